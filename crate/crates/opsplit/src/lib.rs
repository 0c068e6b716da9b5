//! Finite-dimensional operator splitting: proximal building blocks, the
//! classical splitting iterations (Douglas-Rachford, Peaceman-Rachford,
//! Chambolle-Pock, two ADMM variants, Dykstra, alternating projections,
//! forward-backward) and verifiers that check the iterate-by-iterate
//! correspondences between them.
//!
//! Everything runs with unit prox parameter over dense real vectors. See the
//! examples directory for end-to-end usage; the `opsplit` binary exposes the
//! same functionality behind `run`, `verify` and `counterexample`
//! subcommands.

pub mod algorithms;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod lifting;
pub mod linalg;
pub mod problems;
pub mod prox;
pub mod resolvent;

pub use algorithms::{Method, ProxOracle, StartState, Trace};
pub use equivalence::{CounterexampleOutcome, EquivalenceReport};
pub use error::{Error, Result};
pub use lifting::{lift, LiftedProblem};
pub use linalg::{DenseOperator, RealVector};
pub use problems::{ProblemBundle, ProblemForm};
pub use prox::ProxFunction;
pub use resolvent::GeneralizedResolvent;
