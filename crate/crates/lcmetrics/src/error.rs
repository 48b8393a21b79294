use thiserror::Error;

/// Error type for all library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires dimension 1, got {0}")]
    NotOneDimensional(usize),

    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance matrix is not symmetric positive definite")]
    NotSpd,

    #[error("unsupported distribution structure: {0}")]
    UnsupportedStructure(String),

    #[error("operation requires an isotropic input: {0}")]
    NotIsotropic(String),

    #[error("all suite instances are vacuous; no constant can be fitted")]
    AllVacuous,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
