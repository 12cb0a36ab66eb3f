use thiserror::Error;

/// Errors raised by the game, instance and protocol machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what}: m = {m} exceeds cap {cap}")]
    Capacity { what: &'static str, m: usize, cap: usize },

    #[error("invalid {0}")]
    Validation(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("not applicable: {0}")]
    Applicability(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, m: usize, cap: usize) -> Self {
        Error::Capacity { what, m, cap }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
