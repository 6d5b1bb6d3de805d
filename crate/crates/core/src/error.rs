use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdtError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("numeric failure: {message}")]
    NumericFailure {
        message: String,
        /// Best objective value reached before giving up, when one exists.
        best_lower_bound: Option<f64>,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T, E = QdtError> = std::result::Result<T, E>;
