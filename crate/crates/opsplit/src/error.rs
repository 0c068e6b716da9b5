use thiserror::Error;

/// Errors surfaced by the toolbox.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector entries must be finite")]
    NonFiniteEntry,

    #[error("vector dimension must be at least 1")]
    EmptyVector,

    #[error("matrix is not symmetric within {tol:e}")]
    NotSymmetric { tol: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("Gram matrix L*L is numerically singular (condition number {cond:e})")]
    SingularGram { cond: f64 },

    #[error("operator norm {norm} exceeds 1")]
    NormExceedsOne { norm: f64 },

    #[error("expected an indicator function (projection oracle)")]
    NotAnIndicator,

    #[error("no closed-form value for this conjugate; only its prox is available")]
    UnsupportedValue,

    #[error("inner solver did not reach residual 1e-12 within the iteration cap (final residual {residual:e})")]
    InnerSolverFailed { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
