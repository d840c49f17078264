//! Error type shared by all modules.

/// Errors produced by simulator and statistics operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input is structurally valid but statistically unusable
    /// (constant trace, zero variance, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A scenario or data set failed a consistency check.
    #[error("validation failed: {0}")]
    Validation(String),

    /// A file did not conform to its documented format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A distribution family is outside the operation's supported set.
    #[error("unsupported distribution family: {0}")]
    UnsupportedFamily(String),

    /// The requested quantity is mathematically undefined at this point.
    #[error("undefined value: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
