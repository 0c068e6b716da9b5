//! The generalized resolvent (L*L + ∂g)⁻¹ and the dual proximal maps built
//! from it:
//!
//! - `Prox_{(g*∘L*)*} = L (L*L + ∂g)⁻¹ L*`
//! - `Prox_{g*∘L*}    = Id − L (L*L + ∂g)⁻¹ L*`
//!
//! The resolvent is single-valued because L*L is strictly monotone. Closed
//! forms exist for quadratic g and for indicators of points / subspaces /
//! affine sets; everything else falls back to proximal gradient on the
//! strongly convex inner objective.

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector};
use crate::prox::{Kind, ProxFunction};

/// Which route `solve` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    QuadraticG,
    AffineIndicatorG,
    IterativeFallback,
}

/// The map r ↦ (L*L + ∂g)⁻¹ r for L: Y → X and g on Y.
#[derive(Debug, Clone)]
pub struct GeneralizedResolvent {
    l: DenseOperator,
    g: ProxFunction,
    gram: DenseOperator,
    solver: Solver,
}

#[derive(Debug, Clone)]
enum Solver {
    /// g = ½⟨b, Qb⟩ + ⟨c, b⟩ (Q possibly zero): solve (L*L + Q) b = r − c.
    Quadratic {
        system: DenseOperator,
        c: RealVector,
    },
    /// g = ι_{offset + span(basis)}: b = offset + M t with (MᵀGM) t = Mᵀ(r − G·offset).
    Affine {
        basis: DenseOperator,
        offset: RealVector,
        reduced: DenseOperator,
    },
    /// g = ι_{point}: the domain forces b = point.
    Point { point: RealVector },
    /// Proximal gradient with step 1/λ_max(L*L), started at 0.
    Iterative { step: f64 },
}

const INNER_TOL: f64 = 1e-12;
const INNER_MAX_ITERS: usize = 100_000;

impl GeneralizedResolvent {
    /// Builds the resolvent; rejects problems whose Gram matrix L*L is
    /// numerically singular.
    pub fn new(l: DenseOperator, g: ProxFunction) -> Result<Self> {
        if g.dim() != l.cols() {
            return Err(Error::DimensionMismatch {
                expected: l.cols(),
                got: g.dim(),
            });
        }
        l.check_gram_invertible()?;
        let gram = l.gram();
        let solver = match g.kind() {
            Kind::Zero { dim } => Solver::Quadratic {
                system: gram.clone(),
                c: RealVector::zeros(*dim),
            },
            Kind::Quadratic { q, c, .. } => Solver::Quadratic {
                system: gram.add_matrix(q)?,
                c: c.clone(),
            },
            Kind::IndicatorPoint { point } => Solver::Point {
                point: point.clone(),
            },
            Kind::IndicatorSubspace { basis } => {
                let reduced = basis.transpose().compose(&gram)?.compose(basis)?;
                Solver::Affine {
                    basis: basis.clone(),
                    offset: RealVector::zeros(basis.rows()),
                    reduced,
                }
            }
            Kind::IndicatorAffine { basis, offset } => {
                let reduced = basis.transpose().compose(&gram)?.compose(basis)?;
                Solver::Affine {
                    basis: basis.clone(),
                    offset: offset.clone(),
                    reduced,
                }
            }
            _ => Solver::Iterative {
                step: 1.0 / gram.largest_eigenvalue_sym(),
            },
        };
        Ok(Self { l, g, gram, solver })
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.l
    }

    pub fn function(&self) -> &ProxFunction {
        &self.g
    }

    pub fn solver_kind(&self) -> SolverKind {
        match self.solver {
            Solver::Quadratic { .. } => SolverKind::QuadraticG,
            Solver::Affine { .. } | Solver::Point { .. } => SolverKind::AffineIndicatorG,
            Solver::Iterative { .. } => SolverKind::IterativeFallback,
        }
    }

    /// The unique b with r ∈ L*L b + ∂g(b), equivalently the minimizer of
    /// ½⟨b, L*L b⟩ − ⟨r, b⟩ + g(b).
    pub fn solve(&self, r: &RealVector) -> Result<RealVector> {
        if r.dim() != self.l.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.l.cols(),
                got: r.dim(),
            });
        }
        match &self.solver {
            Solver::Quadratic { system, c } => system.solve_linear(&(r - c)),
            Solver::Affine {
                basis,
                offset,
                reduced,
            } => {
                let rhs = basis.adjoint_apply(&(r - &self.gram.apply(offset)?))?;
                let t = reduced.solve_linear(&rhs)?;
                Ok(&basis.apply(&t)? + offset)
            }
            Solver::Point { point } => Ok(point.clone()),
            Solver::Iterative { step } => {
                let mut b = RealVector::zeros(self.l.cols());
                for _ in 0..INNER_MAX_ITERS {
                    let grad = &self.gram.apply(&b)? - r;
                    let next = self.g.prox_scaled(&(&b - &(&grad * *step)), *step);
                    let residual = (&b - &next).norm() / *step;
                    b = next;
                    if residual <= INNER_TOL {
                        return Ok(b);
                    }
                }
                let grad = &self.gram.apply(&b)? - r;
                let next = self.g.prox_scaled(&(&b - &(&grad * *step)), *step);
                Err(Error::InnerSolverFailed {
                    residual: (&b - &next).norm() / *step,
                })
            }
        }
    }

    /// `Prox_{(g*∘L*)*}(x) = L (L*L + ∂g)⁻¹ L* x`.
    pub fn prox_dual_composition(&self, x: &RealVector) -> Result<RealVector> {
        if x.dim() != self.l.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.l.rows(),
                got: x.dim(),
            });
        }
        let b = self.solve(&self.l.adjoint_apply(x)?)?;
        self.l.apply(&b)
    }

    /// `Prox_{g*∘L*}(x) = x − L (L*L + ∂g)⁻¹ L* x`.
    pub fn prox_composition_conjugate(&self, x: &RealVector) -> Result<RealVector> {
        Ok(x - &self.prox_dual_composition(x)?)
    }
}
