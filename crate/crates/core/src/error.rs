//! Error types for every route.

use alloc::string::String;

/// Parameter validation failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("epsilon must satisfy 0 < epsilon < 2, got {0}")]
    EpsilonOutOfRange(f64),
    #[error("1/ε ∈ Z: 1/epsilon is within 1e-9 of the integer {integer} (epsilon = {epsilon})")]
    ResonantEpsilon { epsilon: f64, integer: i64 },
    #[error("truncation size must be at least 1")]
    EmptySection,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Failures of the numerical routes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericalError {
    #[error("eigenvalue iteration did not converge at index {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },
    #[error("inverse iteration failed for eigenvalue index {index}")]
    InverseIteration { index: usize },
    #[error("minimal solution vanishes at index 1 (|v1| = {magnitude:e}); lambda is a zero of v1")]
    VanishingFirstComponent { magnitude: f64 },
    #[error("backward recurrence did not settle: relative change {change:e} after start index {start}")]
    BackwardUnsettled { change: f64, start: usize },
    #[error("weight w has a pole at z = 0")]
    WeightPole,
    #[error("mass matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("quadrature did not converge: worst entry ({row}, {col}) changed by {change:e}")]
    Quadrature { row: usize, col: usize, change: f64 },
    #[error("symmetric eigensolver did not converge at index {index}")]
    SymmetricEigen { index: usize },
    #[error("ill-conditioned connection fit (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("only {points} usable points in the fit range (at least 5 needed)")]
    UnreliableFit { points: usize },
    #[error("{0}")]
    Other(String),
}

/// Either kind of failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Numerical(#[from] NumericalError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
