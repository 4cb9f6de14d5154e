use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("function has radial (non-polynomial) terms")]
    NotPolynomial,

    #[error("function is not harmonic (Laplacian has {0} nonzero terms)")]
    NotHarmonic(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("under-determined system: rank {rank} < {unknowns}")]
    UnderDetermined { rank: usize, unknowns: usize },

    #[error("invariant `{invariant}` violated: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    Invariant {
        invariant: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("internal solver failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
