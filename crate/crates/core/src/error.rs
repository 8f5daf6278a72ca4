use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid component: {0}")]
    InvalidComponent(String),

    #[error("weights sum to {sum}, expected 1 within {tol:e}")]
    Unnormalized { sum: f64, tol: f64 },

    #[error("distribution has no components")]
    EmptyDistribution,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty instance")]
    EmptyInstance,

    #[error("noise {index} is not atoms-only")]
    NonAtomicNoise { index: usize },

    #[error("joint outcome count {count} exceeds cap {cap}")]
    TooManyOutcomes { count: u128, cap: u128 },

    #[error("degenerate offset profile: {0}")]
    DegenerateProfile(String),

    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e})")]
    QuadratureFailed { tol: f64, estimate: f64 },

    #[error("empty index set")]
    EmptyIndexSet,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
