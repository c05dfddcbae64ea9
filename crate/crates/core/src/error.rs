use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Kernel queried on coincident points.
    #[error("singular input: {0}")]
    Singular(String),

    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Rejected parameter or configuration value.
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    /// Truncation could not certify the requested tolerance.
    #[error("truncation failed: {0}")]
    Truncation(String),

    /// Solver failure that left no usable iterate.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
