//! Product-space lifting for running Chambolle-Pock as a DR iteration.
//!
//! Given A: X → Y with ‖A‖ ≤ 1, set C := (Id − AA*)^{1/2} and
//! B: X×Z → Y, (x, z) ↦ Ax + Cz, so that BB* = Id. The lifted function is
//! f̃(x, z) = f(x) + ι_{0}(z), whose prox is (Prox_f x, 0), and
//! Prox_{(g∘B)*} = B* Prox_{g*} B.

use crate::algorithms::ProxOracle;
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector};
use crate::prox::ProxFunction;

/// The lifted problem data: A, C, the block row B = [A C] and f̃.
#[derive(Debug, Clone)]
pub struct LiftedProblem {
    a: DenseOperator,
    c: DenseOperator,
    b: DenseOperator,
    f_tilde: ProxFunction,
    dim_x: usize,
    dim_z: usize,
}

/// Builds the lifting of (A, f); rejects operators with ‖A‖ > 1.
///
/// Z is given the dimension of Y and C is the symmetric PSD square root of
/// Id − AA*.
pub fn lift(a: DenseOperator, f: ProxFunction) -> Result<LiftedProblem> {
    if f.dim() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: f.dim(),
        });
    }
    let norm = a.operator_norm();
    if norm > 1.0 + 1e-10 {
        return Err(Error::NormExceedsOne { norm });
    }
    let dim_y = a.rows();
    let aat = a.compose(&a.transpose())?;
    let c = DenseOperator::identity(dim_y).sub_matrix(&aat)?.psd_sqrt()?;
    let b = a.hstack(&c)?;
    let f_tilde = ProxFunction::separable_pair(
        f,
        ProxFunction::indicator_point(RealVector::zeros(dim_y)),
    );
    Ok(LiftedProblem {
        dim_x: a.cols(),
        dim_z: dim_y,
        a,
        c,
        b,
        f_tilde,
    })
}

impl LiftedProblem {
    pub fn a(&self) -> &DenseOperator {
        &self.a
    }

    pub fn c(&self) -> &DenseOperator {
        &self.c
    }

    /// The block row B = [A C].
    pub fn b(&self) -> &DenseOperator {
        &self.b
    }

    /// f̃(x, z) = f(x) + ι_{0}(z) on X×Z.
    pub fn f_tilde(&self) -> &ProxFunction {
        &self.f_tilde
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn dim_z(&self) -> usize {
        self.dim_z
    }

    /// ‖BB* − Id‖_max; zero up to round-off by construction.
    pub fn bb_star_error(&self) -> f64 {
        let bbt = self.b.compose(&self.b.transpose()).expect("square blocks");
        bbt.sub_matrix(&DenseOperator::identity(self.b.rows()))
            .expect("same shape")
            .max_abs()
    }

    /// Prox of f̃ at (x, z): (Prox_f x, 0).
    pub fn prox_f_tilde(&self, x: &RealVector, z: &RealVector) -> (RealVector, RealVector) {
        let joint = self.f_tilde.prox(&x.concat(z));
        joint.split_at(self.dim_x)
    }

    /// Prox_{(g∘B)*}(w) = B* Prox_{g*}(B w).
    pub fn prox_gb_conjugate(
        &self,
        g_conj: &dyn ProxOracle,
        w: &RealVector,
    ) -> Result<RealVector> {
        let bw = self.b.apply(w)?;
        self.b.adjoint_apply(&g_conj.prox_map(&bw)?)
    }
}
