use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad dimension, bad parameter value).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The operation needs an explicit (dense) representation.
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),
    /// The request would exceed the dense-table resource budget.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
