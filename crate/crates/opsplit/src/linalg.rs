//! Dense finite-dimensional vectors and linear operators.
//!
//! Everything is real and dense; symmetric eigendecomposition is the single
//! numerical kernel behind operator norms, PSD square roots and Gram
//! conditioning checks.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetry / PSD check tolerance.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Adjoint identity tolerance.
pub const ADJOINT_TOL: f64 = 1e-12;
/// Gram matrices with a condition number above this are rejected.
pub const GRAM_COND_LIMIT: f64 = 1e12;

/// A point of a finite-dimensional real space.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(DVector<f64>);

impl RealVector {
    /// Builds a vector, rejecting empty or non-finite input.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// Concatenation, used for product-space points (x, z).
    pub fn concat(&self, other: &Self) -> Self {
        let mut entries = self.as_slice().to_vec();
        entries.extend_from_slice(other.as_slice());
        Self(DVector::from_vec(entries))
    }

    /// Splits into the first `k` and remaining entries.
    pub fn split_at(&self, k: usize) -> (Self, Self) {
        assert!(k >= 1 && k < self.dim());
        let s = self.as_slice();
        (
            Self(DVector::from_column_slice(&s[..k])),
            Self(DVector::from_column_slice(&s[k..])),
        )
    }

    pub(crate) fn inner(&self) -> &DVector<f64> {
        &self.0
    }
}

impl Index<usize> for RealVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &RealVector {
    type Output = RealVector;
    fn add(self, rhs: &RealVector) -> RealVector {
        assert_eq!(self.dim(), rhs.dim());
        RealVector(&self.0 + &rhs.0)
    }
}

impl Sub for &RealVector {
    type Output = RealVector;
    fn sub(self, rhs: &RealVector) -> RealVector {
        assert_eq!(self.dim(), rhs.dim());
        RealVector(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &RealVector {
    type Output = RealVector;
    fn mul(self, s: f64) -> RealVector {
        RealVector(&self.0 * s)
    }
}

impl Neg for &RealVector {
    type Output = RealVector;
    fn neg(self) -> RealVector {
        RealVector(-&self.0)
    }
}

/// A matrix-backed linear map together with its adjoint.
///
/// An operator maps a `cols`-dimensional space into a `rows`-dimensional one;
/// `adjoint_apply` is multiplication by the transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<f64>);

impl DenseOperator {
    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyVector);
        }
        let ncols = rows[0].len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Ok(Self(DMatrix::from_row_slice(rows.len(), ncols, &flat)))
    }

    /// Builds an operator whose columns are the given vectors.
    pub fn from_columns(cols: &[RealVector]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::EmptyVector);
        }
        let dim = cols[0].dim();
        if cols.iter().any(|c| c.dim() != dim) {
            return Err(Error::InvalidParameter("ragged matrix columns".into()));
        }
        let cols: Vec<DVector<f64>> = cols.iter().map(|c| c.inner().clone()).collect();
        Ok(Self(DMatrix::from_columns(&cols)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &RealVector) -> Result<RealVector> {
        if v.dim() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                got: v.dim(),
            });
        }
        Ok(RealVector(&self.0 * v.inner()))
    }

    /// Transpose-matrix-vector product.
    pub fn adjoint_apply(&self, w: &RealVector) -> Result<RealVector> {
        if w.dim() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: w.dim(),
            });
        }
        Ok(RealVector(self.0.tr_mul(w.inner())))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// The Gram matrix L*L.
    pub fn gram(&self) -> Self {
        Self(self.0.tr_mul(&self.0))
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                got: rhs.rows(),
            });
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add_matrix(&self, rhs: &Self) -> Result<Self> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: rhs.rows(),
            });
        }
        Ok(Self(&self.0 + &rhs.0))
    }

    pub fn sub_matrix(&self, rhs: &Self) -> Result<Self> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: rhs.rows(),
            });
        }
        Ok(Self(&self.0 - &rhs.0))
    }

    /// Horizontal block concatenation [self rhs].
    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: rhs.rows(),
            });
        }
        let mut m = DMatrix::zeros(self.rows(), self.cols() + rhs.cols());
        m.view_mut((0, 0), (self.rows(), self.cols())).copy_from(&self.0);
        m.view_mut((0, self.cols()), (rhs.rows(), rhs.cols()))
            .copy_from(&rhs.0);
        Ok(Self(m))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// Largest singular value, via the symmetric eigendecomposition of L*L.
    pub fn operator_norm(&self) -> f64 {
        let eigs = self.gram().0.symmetric_eigenvalues();
        eigs.iter().fold(0.0f64, |m, &e| m.max(e.max(0.0))).sqrt()
    }

    /// Symmetric PSD square root.
    ///
    /// Eigenvalues in [-1e-10, 0) are clamped to 0; anything more negative is
    /// rejected as not PSD.
    pub fn psd_sqrt(&self) -> Result<Self> {
        if self.rows() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: self.cols(),
            });
        }
        let asym = (&self.0 - self.0.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { tol: SYMMETRY_TOL });
        }
        let sym = (&self.0 + self.0.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut roots = eig.eigenvalues.clone();
        for e in roots.iter_mut() {
            if *e < -SYMMETRY_TOL {
                return Err(Error::NotPositiveSemidefinite { eigenvalue: *e });
            }
            *e = e.max(0.0).sqrt();
        }
        let d = DMatrix::from_diagonal(&roots);
        let q = &eig.eigenvectors;
        Ok(Self(q * d * q.transpose()))
    }

    /// Condition number of L*L; rejects numerically singular Gram matrices.
    pub fn check_gram_invertible(&self) -> Result<f64> {
        let eigs = self.gram().0.symmetric_eigenvalues();
        let max = eigs.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e));
        let min = eigs.iter().fold(f64::INFINITY, |m, &e| m.min(e));
        let cond = if min <= 0.0 { f64::INFINITY } else { max / min };
        if !(cond <= GRAM_COND_LIMIT) {
            return Err(Error::SingularGram { cond });
        }
        Ok(cond)
    }

    /// Replaces the columns by an orthonormal basis of their span (thin QR),
    /// so the Gram matrix of the result is the identity.
    pub fn orthonormalize_columns(&self) -> Result<Self> {
        if self.rows() < self.cols() {
            return Err(Error::InvalidParameter(
                "cannot orthonormalize more columns than rows".into(),
            ));
        }
        self.check_gram_invertible()?;
        let qr = self.0.clone().qr();
        let q = qr.q();
        Ok(Self(q.columns(0, self.cols()).into_owned()))
    }

    /// Solves `self * x = rhs` for square, invertible `self`.
    pub(crate) fn solve_linear(&self, rhs: &RealVector) -> Result<RealVector> {
        assert_eq!(self.rows(), self.cols());
        if rhs.dim() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: rhs.dim(),
            });
        }
        let lu = self.0.clone().lu();
        lu.solve(rhs.inner())
            .map(RealVector)
            .ok_or(Error::SingularGram { cond: f64::INFINITY })
    }

    pub(crate) fn smallest_eigenvalue_sym(&self) -> f64 {
        let eigs = self.0.symmetric_eigenvalues();
        eigs.iter().fold(f64::INFINITY, |m, &e| m.min(e))
    }

    pub(crate) fn largest_eigenvalue_sym(&self) -> f64 {
        let eigs = self.0.symmetric_eigenvalues();
        eigs.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e))
    }
}
