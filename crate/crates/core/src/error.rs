use thiserror::Error;

/// Errors raised by the diagonalization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("capacity exceeded: dimension {dim} is above the configured limit {limit}")]
    Capacity { dim: usize, limit: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm {norm})")]
    Normalization { norm: f64 },

    #[error("no convergence after {iterations} iterations (achieved residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("empty subspace: every overlap eigenvalue is at or below the threshold {threshold:e}")]
    EmptySubspace { threshold: f64 },

    #[error("undefined bound: {0}")]
    UndefinedBound(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
