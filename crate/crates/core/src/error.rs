use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("value error: {0}")]
    Value(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric overflow: non-finite state at {at}")]
    NumericOverflow { at: String },

    #[error("missing boundary value for process {process} at index {index}")]
    MissingBoundary { process: usize, index: u64 },

    #[error("missing input value for process {process} at index {index}")]
    MissingInput { process: usize, index: u64 },

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Process exit status for this error: 2 for runtime numeric failures,
    /// 1 for everything caused by configuration or input validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericOverflow { .. } | Error::MissingBoundary { .. } | Error::MissingInput { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
