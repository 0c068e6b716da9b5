//! Reproducible problem instances.
//!
//! Random bundles are generated from a ChaCha8 stream keyed by the seed, so
//! the same seed yields bit-identical matrices on every platform.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector};
use crate::prox::ProxFunction;

/// Which of the three problem shapes a bundle encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemForm {
    /// min f(Ly) + g(y), L: Y → X with L*L invertible.
    CompositeL,
    /// min f(x) + g(Ax), A: X → Y with ‖A‖ ≤ 1.
    CompositeA,
    /// find x ∈ U ∩ V, encoded as (f, g) = (ι_U, ι_V) with op = Id.
    Feasibility,
}

impl ProblemForm {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "composite-l" => Some(Self::CompositeL),
            "composite-a" => Some(Self::CompositeA),
            "feasibility" => Some(Self::Feasibility),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CompositeL => "composite-l",
            Self::CompositeA => "composite-a",
            Self::Feasibility => "feasibility",
        }
    }
}

/// A problem instance: the two functions, the coupling operator and an
/// optional suggested starting point.
#[derive(Debug, Clone)]
pub struct ProblemBundle {
    pub form: ProblemForm,
    pub f: ProxFunction,
    pub g: ProxFunction,
    pub op: DenseOperator,
    pub seed: Option<u64>,
    pub start: Option<RealVector>,
}

impl ProblemBundle {
    /// Assembles a bundle and checks the form's standing assumption.
    pub fn new(
        form: ProblemForm,
        f: ProxFunction,
        g: ProxFunction,
        op: DenseOperator,
    ) -> Result<Self> {
        match form {
            ProblemForm::CompositeL => {
                if f.dim() != op.rows() || g.dim() != op.cols() {
                    return Err(Error::DimensionMismatch {
                        expected: op.rows(),
                        got: f.dim(),
                    });
                }
                op.check_gram_invertible()?;
            }
            ProblemForm::CompositeA => {
                if f.dim() != op.cols() || g.dim() != op.rows() {
                    return Err(Error::DimensionMismatch {
                        expected: op.cols(),
                        got: f.dim(),
                    });
                }
                let norm = op.operator_norm();
                if norm > 1.0 + 1e-10 {
                    return Err(Error::NormExceedsOne { norm });
                }
            }
            ProblemForm::Feasibility => {
                if f.dim() != g.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        got: g.dim(),
                    });
                }
                if !f.is_indicator() || !g.is_indicator() {
                    return Err(Error::NotAnIndicator);
                }
            }
        }
        Ok(Self {
            form,
            f,
            g,
            op,
            seed: None,
            start: None,
        })
    }
}

/// The geometry of the Dykstra-vs-MAP counterexample: U = ℝ·(1,1),
/// V = ℝ×ℝ₋, starting point (α, β) with α < 0 < β and β ≤ −α.
pub fn make_counterexample(alpha: f64, beta: f64) -> Result<ProblemBundle> {
    if !(alpha < 0.0 && beta > 0.0 && beta <= -alpha) {
        return Err(Error::InvalidParameter(format!(
            "counterexample needs alpha < 0 < beta and beta <= -alpha, got ({alpha}, {beta})"
        )));
    }
    let line = ProxFunction::indicator_subspace(&[RealVector::from_slice(&[1.0, 1.0])?])?;
    let halfspace =
        ProxFunction::indicator_halfspace(RealVector::from_slice(&[0.0, 1.0])?, 0.0)?;
    let mut bundle = ProblemBundle::new(
        ProblemForm::Feasibility,
        line,
        halfspace,
        DenseOperator::identity(2),
    )?;
    bundle.start = Some(RealVector::from_slice(&[alpha, beta])?);
    Ok(bundle)
}

/// The closed-form limits of the counterexample: MAP settles at
/// (α/2, α/2), Dykstra converges to P_{U∩V}(α, β) = ((α+β)/2, (α+β)/2).
pub fn counterexample_limits(alpha: f64, beta: f64) -> (RealVector, RealVector) {
    let map = RealVector::from_slice(&[alpha / 2.0, alpha / 2.0]).expect("finite");
    let dykstra =
        RealVector::from_slice(&[(alpha + beta) / 2.0, (alpha + beta) / 2.0]).expect("finite");
    (map, dykstra)
}

fn random_psd_quadratic(rng: &mut ChaCha8Rng, dim: usize) -> ProxFunction {
    let m: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let q = DenseOperator::from_rows(&m)
        .expect("finite entries")
        .gram()
        .add_matrix(&DenseOperator::identity(dim).scale(0.1))
        .expect("square");
    let c = RealVector::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .expect("finite entries");
    ProxFunction::quadratic(q, c).expect("G*G + 0.1 I is symmetric PSD")
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseOperator {
    let m: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    DenseOperator::from_rows(&m).expect("finite entries")
}

/// Deterministic random quadratic bundle. Both functions are strongly convex
/// quadratics (modulus ≥ 0.1); the operator is rescaled so the form's
/// standing assumption holds (orthonormal columns for composite-L, norm ≤ 1
/// for composite-A).
pub fn make_random_quadratic(
    seed: u64,
    dim_x: usize,
    dim_y: usize,
    form: ProblemForm,
) -> Result<ProblemBundle> {
    if dim_x < 1 || dim_y < 1 {
        return Err(Error::InvalidParameter("dimensions must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bundle = match form {
        ProblemForm::CompositeL => {
            if dim_x < dim_y {
                return Err(Error::InvalidParameter(
                    "composite-L needs dim X >= dim Y for an invertible Gram matrix".into(),
                ));
            }
            let f = random_psd_quadratic(&mut rng, dim_x);
            let g = random_psd_quadratic(&mut rng, dim_y);
            let l = random_matrix(&mut rng, dim_x, dim_y).orthonormalize_columns()?;
            ProblemBundle::new(ProblemForm::CompositeL, f, g, l)?
        }
        ProblemForm::CompositeA => {
            let f = random_psd_quadratic(&mut rng, dim_x);
            let g = random_psd_quadratic(&mut rng, dim_y);
            let raw = random_matrix(&mut rng, dim_y, dim_x);
            let scale = rng.gen_range(0.3..1.0) / raw.operator_norm();
            ProblemBundle::new(ProblemForm::CompositeA, f, g, raw.scale(scale))?
        }
        ProblemForm::Feasibility => {
            if dim_x != dim_y {
                return Err(Error::InvalidParameter(
                    "feasibility bundles live in a single space".into(),
                ));
            }
            let span_u: Vec<RealVector> = (0..1.max(dim_x / 2))
                .map(|_| {
                    RealVector::new((0..dim_x).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .expect("finite entries")
                })
                .collect();
            let span_v: Vec<RealVector> = (0..1.max(dim_x / 2))
                .map(|_| {
                    RealVector::new((0..dim_x).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .expect("finite entries")
                })
                .collect();
            ProblemBundle::new(
                ProblemForm::Feasibility,
                ProxFunction::indicator_subspace(&span_u)?,
                ProxFunction::indicator_subspace(&span_v)?,
                DenseOperator::identity(dim_x),
            )?
        }
    };
    bundle.seed = Some(seed);
    Ok(bundle)
}

/// The 1-D bundle f = g = ½t², L = 1; the worked example threaded through
/// the method tests.
pub fn quadratic_identity_bundle_1d() -> ProblemBundle {
    ProblemBundle::new(
        ProblemForm::CompositeL,
        ProxFunction::half_squared_norm(1),
        ProxFunction::half_squared_norm(1),
        DenseOperator::identity(1),
    )
    .expect("identity bundle is well-posed")
}
