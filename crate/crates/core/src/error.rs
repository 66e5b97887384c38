use thiserror::Error;

#[derive(Error, Debug)]
pub enum RoughnessError {
    #[error("level {requested} out of range: {reason}")]
    LevelOutOfRange { requested: i64, reason: String },
    #[error("path of length {0} is not of the form 2^N + 1")]
    InvalidLength(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("circulant embedding has a negative eigenvalue ({0:e})")]
    EmbeddingNotNonnegative(f64),
    #[error("covariance factorization failed: {0}")]
    Factorization(String),
    #[error("transform overflow at index {index} (input {input})")]
    Overflow { index: usize, input: f64 },
    #[error("csv format: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RoughnessError {
    /// True for zero-norm coefficient vectors, which Monte Carlo runs count
    /// and skip instead of aborting.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, RoughnessError::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, RoughnessError>;

pub(crate) fn level_error(requested: i64, reason: impl Into<String>) -> RoughnessError {
    RoughnessError::LevelOutOfRange {
        requested,
        reason: reason.into(),
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> RoughnessError {
    RoughnessError::InvalidParameter(msg.into())
}
