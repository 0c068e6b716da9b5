//! Convex functions with exact proximal maps.
//!
//! The catalog covers the functions the splitting methods need: quadratics,
//! indicators of subspaces / affine sets / half-spaces / boxes / points,
//! weighted l1, half squared distance to a set, and the conjugation /
//! reflection / translation / separable-sum calculus on top of them.
//!
//! Conjugates are represented operationally: their prox comes from the Moreau
//! identity `Prox_f + Prox_{f*} = Id`, so the decomposition holds exactly by
//! construction. Values of conjugates are only available where a closed form
//! exists.

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, RealVector, SYMMETRY_TOL};

/// A proper lsc convex function exposing its value and proximal map.
#[derive(Debug, Clone)]
pub struct ProxFunction {
    kind: Kind,
}

#[derive(Debug, Clone)]
pub(crate) enum Kind {
    Zero {
        dim: usize,
    },
    /// ½⟨x, Qx⟩ + ⟨c, x⟩ with Q symmetric PSD.
    Quadratic {
        q: DenseOperator,
        c: RealVector,
        modulus: f64,
    },
    /// Indicator of the span of the basis columns.
    IndicatorSubspace {
        basis: DenseOperator,
    },
    /// Indicator of offset + span(basis columns).
    IndicatorAffine {
        basis: DenseOperator,
        offset: RealVector,
    },
    /// Indicator of { x : ⟨normal, x⟩ ≤ offset }.
    IndicatorHalfspace {
        normal: RealVector,
        offset: f64,
    },
    IndicatorBox {
        lo: RealVector,
        hi: RealVector,
    },
    IndicatorPoint {
        point: RealVector,
    },
    /// weight · Σ|x_i|.
    L1 {
        dim: usize,
        weight: f64,
    },
    /// ½ d²(·, C) for an indicator-described set C.
    HalfSquaredDistance {
        set: Box<ProxFunction>,
    },
    Conjugate {
        inner: Box<ProxFunction>,
    },
    /// x ↦ inner(−x).
    Reflection {
        inner: Box<ProxFunction>,
    },
    /// x ↦ inner(x − shift).
    Translation {
        inner: Box<ProxFunction>,
        shift: RealVector,
    },
    /// (x, z) ↦ first(x) + second(z) on the product space.
    SeparablePair {
        first: Box<ProxFunction>,
        second: Box<ProxFunction>,
    },
}

impl ProxFunction {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { kind: Kind::Zero { dim } }
    }

    /// ½⟨x, Qx⟩ + ⟨c, x⟩; Q must be symmetric PSD.
    pub fn quadratic(q: DenseOperator, c: RealVector) -> Result<Self> {
        if q.rows() != q.cols() || q.rows() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.rows(),
                got: c.dim(),
            });
        }
        let asym = q.sub_matrix(&q.transpose())?.max_abs();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { tol: SYMMETRY_TOL });
        }
        let lambda_min = q.smallest_eigenvalue_sym();
        if lambda_min < -SYMMETRY_TOL {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: lambda_min,
            });
        }
        Ok(Self {
            kind: Kind::Quadratic {
                q,
                c,
                modulus: lambda_min.max(0.0),
            },
        })
    }

    /// ½‖x‖² convenience constructor.
    pub fn half_squared_norm(dim: usize) -> Self {
        Self::quadratic(DenseOperator::identity(dim), RealVector::zeros(dim))
            .expect("identity is symmetric PSD")
    }

    /// Indicator of the span of the given (not necessarily orthonormal,
    /// linearly independent) vectors.
    pub fn indicator_subspace(spanning: &[RealVector]) -> Result<Self> {
        let basis = DenseOperator::from_columns(spanning)?;
        basis.check_gram_invertible()?;
        Ok(Self {
            kind: Kind::IndicatorSubspace { basis },
        })
    }

    /// Indicator of offset + span(spanning vectors).
    pub fn indicator_affine(spanning: &[RealVector], offset: RealVector) -> Result<Self> {
        let basis = DenseOperator::from_columns(spanning)?;
        basis.check_gram_invertible()?;
        if basis.rows() != offset.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.rows(),
                got: offset.dim(),
            });
        }
        Ok(Self {
            kind: Kind::IndicatorAffine { basis, offset },
        })
    }

    /// Indicator of { x : ⟨normal, x⟩ ≤ offset }.
    pub fn indicator_halfspace(normal: RealVector, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidParameter("half-space normal is zero".into()));
        }
        Ok(Self {
            kind: Kind::IndicatorHalfspace { normal, offset },
        })
    }

    pub fn indicator_box(lo: RealVector, hi: RealVector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.as_slice().iter().zip(hi.as_slice()).any(|(l, h)| l > h) {
            return Err(Error::InvalidParameter("box has lo > hi".into()));
        }
        Ok(Self {
            kind: Kind::IndicatorBox { lo, hi },
        })
    }

    pub fn indicator_point(point: RealVector) -> Self {
        Self {
            kind: Kind::IndicatorPoint { point },
        }
    }

    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        assert!(dim >= 1);
        if !(weight >= 0.0) {
            return Err(Error::InvalidParameter("l1 weight must be >= 0".into()));
        }
        Ok(Self {
            kind: Kind::L1 { dim, weight },
        })
    }

    /// ½ d²(·, C) where C is described by an indicator function.
    pub fn half_squared_distance(set: ProxFunction) -> Result<Self> {
        if !set.is_indicator() {
            return Err(Error::NotAnIndicator);
        }
        Ok(Self {
            kind: Kind::HalfSquaredDistance { set: Box::new(set) },
        })
    }

    pub fn translation(inner: ProxFunction, shift: RealVector) -> Result<Self> {
        if inner.dim() != shift.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                got: shift.dim(),
            });
        }
        Ok(Self {
            kind: Kind::Translation {
                inner: Box::new(inner),
                shift,
            },
        })
    }

    pub fn separable_pair(first: ProxFunction, second: ProxFunction) -> Self {
        Self {
            kind: Kind::SeparablePair {
                first: Box::new(first),
                second: Box::new(second),
            },
        }
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Zero { dim } | Kind::L1 { dim, .. } => *dim,
            Kind::Quadratic { c, .. } => c.dim(),
            Kind::IndicatorSubspace { basis } => basis.rows(),
            Kind::IndicatorAffine { basis, .. } => basis.rows(),
            Kind::IndicatorHalfspace { normal, .. } => normal.dim(),
            Kind::IndicatorBox { lo, .. } => lo.dim(),
            Kind::IndicatorPoint { point } => point.dim(),
            Kind::HalfSquaredDistance { set } => set.dim(),
            Kind::Conjugate { inner } | Kind::Reflection { inner } => inner.dim(),
            Kind::Translation { inner, .. } => inner.dim(),
            Kind::SeparablePair { first, second } => first.dim() + second.dim(),
        }
    }

    /// True when the function is the indicator of a closed convex set, i.e.
    /// its prox is a metric projection.
    pub fn is_indicator(&self) -> bool {
        match &self.kind {
            Kind::IndicatorSubspace { .. }
            | Kind::IndicatorAffine { .. }
            | Kind::IndicatorHalfspace { .. }
            | Kind::IndicatorBox { .. }
            | Kind::IndicatorPoint { .. } => true,
            Kind::Reflection { inner } | Kind::Translation { inner, .. } => inner.is_indicator(),
            Kind::SeparablePair { first, second } => first.is_indicator() && second.is_indicator(),
            _ => false,
        }
    }

    /// Strong-convexity modulus (0 when none is known).
    pub fn strongly_convex_modulus(&self) -> f64 {
        match &self.kind {
            Kind::Quadratic { modulus, .. } => *modulus,
            Kind::IndicatorPoint { .. } => f64::INFINITY,
            Kind::Reflection { inner } | Kind::Translation { inner, .. } => {
                inner.strongly_convex_modulus()
            }
            Kind::SeparablePair { first, second } => first
                .strongly_convex_modulus()
                .min(second.strongly_convex_modulus()),
            _ => 0.0,
        }
    }

    /// Function value, with +∞ outside indicator domains.
    ///
    /// Conjugates only support values where a closed form exists (quadratic
    /// with invertible Q, zero, l1); elsewhere this returns
    /// [`Error::UnsupportedValue`] and only the prox is exposed.
    pub fn value(&self, x: &RealVector) -> Result<f64> {
        assert_eq!(x.dim(), self.dim(), "value: dimension mismatch");
        match &self.kind {
            Kind::Zero { .. } => Ok(0.0),
            Kind::Quadratic { q, c, .. } => {
                let qx = q.apply(x)?;
                Ok(0.5 * x.dot(&qx) + c.dot(x))
            }
            Kind::IndicatorSubspace { .. }
            | Kind::IndicatorAffine { .. }
            | Kind::IndicatorHalfspace { .. }
            | Kind::IndicatorBox { .. }
            | Kind::IndicatorPoint { .. } => {
                let p = self.prox(x);
                if (&p - x).max_abs() <= 1e-12 * (1.0 + x.max_abs()) {
                    Ok(0.0)
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Kind::L1 { weight, .. } => {
                Ok(weight * x.as_slice().iter().map(|e| e.abs()).sum::<f64>())
            }
            Kind::HalfSquaredDistance { set } => {
                let p = set.prox(x);
                Ok(0.5 * (&p - x).norm().powi(2))
            }
            Kind::Conjugate { inner } => conjugate_value(inner, x),
            Kind::Reflection { inner } => inner.value(&-x),
            Kind::Translation { inner, shift } => inner.value(&(x - shift)),
            Kind::SeparablePair { first, second } => {
                let (a, b) = x.split_at(first.dim());
                Ok(first.value(&a)? + second.value(&b)?)
            }
        }
    }

    /// The proximal map `argmin_y f(y) + ½‖x − y‖²`.
    pub fn prox(&self, x: &RealVector) -> RealVector {
        self.prox_scaled(x, 1.0)
    }

    /// Prox of the scaled function s·f, i.e. `argmin_y f(y) + ‖x − y‖²/(2s)`.
    ///
    /// Needed by the iterative resolvent fallback; `s = 1` recovers [`Self::prox`].
    pub fn prox_scaled(&self, x: &RealVector, s: f64) -> RealVector {
        assert_eq!(x.dim(), self.dim(), "prox: dimension mismatch");
        assert!(s > 0.0, "prox scale must be positive");
        match &self.kind {
            Kind::Zero { .. } => x.clone(),
            Kind::Quadratic { q, c, .. } => {
                // (I + sQ) y = x − s c
                let m = DenseOperator::identity(q.rows())
                    .add_matrix(&q.scale(s))
                    .expect("square");
                let rhs = x - &(c * s);
                m.solve_linear(&rhs).expect("I + sQ is positive definite")
            }
            Kind::IndicatorSubspace { basis } => project_span(basis, x),
            Kind::IndicatorAffine { basis, offset } => {
                &project_span(basis, &(x - offset)) + offset
            }
            Kind::IndicatorHalfspace { normal, offset } => {
                let slack = normal.dot(x) - offset;
                if slack <= 0.0 {
                    x.clone()
                } else {
                    x - &(normal * (slack / normal.dot(normal)))
                }
            }
            Kind::IndicatorBox { lo, hi } => RealVector::new(
                x.as_slice()
                    .iter()
                    .zip(lo.as_slice())
                    .zip(hi.as_slice())
                    .map(|((&e, &l), &h)| e.clamp(l, h))
                    .collect(),
            )
            .expect("clamped entries are finite"),
            Kind::IndicatorPoint { point } => point.clone(),
            Kind::L1 { weight, .. } => {
                let t = s * weight;
                RealVector::new(
                    x.as_slice()
                        .iter()
                        .map(|&e| {
                            if e > t {
                                e - t
                            } else if e < -t {
                                e + t
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )
                .expect("thresholded entries are finite")
            }
            Kind::HalfSquaredDistance { set } => {
                // prox of s·½d²_C is x + s/(1+s)(P_C x − x)
                let p = set.prox(x);
                x + &(&(&p - x) * (s / (1.0 + s)))
            }
            // Moreau for scaled conjugates: prox_{s f*}(x) = x − s prox_{f/s}(x/s)
            Kind::Conjugate { inner } => {
                x - &(&inner.prox_scaled(&(x * (1.0 / s)), 1.0 / s) * s)
            }
            Kind::Reflection { inner } => -&inner.prox_scaled(&-x, s),
            Kind::Translation { inner, shift } => {
                &inner.prox_scaled(&(x - shift), s) + shift
            }
            Kind::SeparablePair { first, second } => {
                let (a, b) = x.split_at(first.dim());
                first.prox_scaled(&a, s).concat(&second.prox_scaled(&b, s))
            }
        }
    }

    /// The Fenchel conjugate, with prox given by the Moreau identity.
    ///
    /// Catalog members with exactly representable conjugates (zero, l1) are
    /// rewritten into their closed forms; double conjugation unwraps.
    pub fn conjugate(&self) -> ProxFunction {
        match &self.kind {
            Kind::Conjugate { inner } => (**inner).clone(),
            Kind::Zero { dim } => Self::indicator_point(RealVector::zeros(*dim)),
            Kind::L1 { dim, weight } => {
                let lo = RealVector::new(vec![-weight; *dim]).expect("finite");
                let hi = RealVector::new(vec![*weight; *dim]).expect("finite");
                Self::indicator_box(lo, hi).expect("lo <= hi")
            }
            _ => Self {
                kind: Kind::Conjugate {
                    inner: Box::new(self.clone()),
                },
            },
        }
    }

    /// g∨ : x ↦ g(−x), with prox(g∨, x) = −prox(g, −x).
    pub fn reflect(&self) -> ProxFunction {
        match &self.kind {
            Kind::Reflection { inner } => (**inner).clone(),
            Kind::Zero { .. } => self.clone(),
            _ => Self {
                kind: Kind::Reflection {
                    inner: Box::new(self.clone()),
                },
            },
        }
    }

    /// The reflected resolvent R_f = 2 Prox_f − Id.
    pub fn reflected_resolvent(&self, x: &RealVector) -> RealVector {
        &(&self.prox(x) * 2.0) - x
    }
}

/// Gradient of ½d²_U at x, namely x − P_U(x).
///
/// The argument must be an indicator function (its prox is the projection).
pub fn grad_half_sq_distance(set_projector: &ProxFunction, x: &RealVector) -> Result<RealVector> {
    if !set_projector.is_indicator() {
        return Err(Error::NotAnIndicator);
    }
    Ok(x - &set_projector.prox(x))
}

/// Orthogonal projection onto span(basis columns): B (BᵀB)⁻¹ Bᵀ x.
fn project_span(basis: &DenseOperator, x: &RealVector) -> RealVector {
    let bt_x = basis.adjoint_apply(x).expect("dims checked at construction");
    let t = basis
        .gram()
        .solve_linear(&bt_x)
        .expect("gram invertibility checked at construction");
    basis.apply(&t).expect("dims checked at construction")
}

fn conjugate_value(inner: &ProxFunction, x: &RealVector) -> Result<f64> {
    match inner.kind() {
        // (q_Q + ⟨c,·⟩)*(x) = q_{Q⁻¹}(x − c) when Q is invertible
        Kind::Quadratic { q, c, modulus } => {
            if *modulus <= 0.0 {
                return Err(Error::UnsupportedValue);
            }
            let shifted = x - c;
            let z = q.solve_linear(&shifted)?;
            Ok(0.5 * shifted.dot(&z))
        }
        Kind::Zero { .. } => Ok(if x.max_abs() == 0.0 { 0.0 } else { f64::INFINITY }),
        Kind::L1 { weight, .. } => Ok(if x.max_abs() <= *weight {
            0.0
        } else {
            f64::INFINITY
        }),
        _ => Err(Error::UnsupportedValue),
    }
}
