//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector/index dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An enumeration would materialize more points than the configured cap.
    #[error("size limit exceeded: {detail}")]
    SizeLimit { detail: String },

    /// The operation was called in a way its contract forbids.
    #[error("usage error: {0}")]
    Usage(String),

    /// A document failed structural validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A document could not be parsed at all.
    #[error("parse error: {0}")]
    Parse(String),

    /// An iterative solver did not converge within its iteration cap.
    #[error("solver did not converge: {0}")]
    Solver(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
