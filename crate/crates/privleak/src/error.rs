use thiserror::Error;

/// Errors produced by the analysis and numerics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A matrix expected to be symmetric is not, beyond the relative tolerance.
    #[error("matrix is not symmetric")]
    NotSymmetric,
    /// A Cholesky pivot fell below the positivity threshold. For a noise
    /// covariance this means it is not a valid (positive definite) covariance.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    /// A pivot vanished during Gaussian elimination.
    #[error("linear system is singular")]
    Singular,
    /// The Jacobi sweep limit was exhausted before the off-diagonal target.
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    /// Matrix or vector dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A sample index that must lie strictly after the change time does not.
    #[error("sample index {k} must exceed the change time {k_star}")]
    TimeIndex { k: usize, k_star: usize },
    /// The horizon equals the change time, leaving no shift to test.
    #[error("empty shift range: horizon equals the change time")]
    EmptyTauRange,
    /// The reference constraint cannot be met at steady state.
    #[error("steady-state program is infeasible")]
    Infeasible,
    /// The model is not stable, so no steady state exists.
    #[error("model is not stable")]
    Unstable,
    /// The nominal input already carries no change-time information.
    #[error("input is already fully private; no regularization weight is defined")]
    AlreadyFullyPrivate,
    /// An output sequence does not match the model dimensions.
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    /// Fewer than two Monte Carlo trials were requested.
    #[error("at least two trials are required")]
    TooFewTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
