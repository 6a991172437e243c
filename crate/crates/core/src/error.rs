use thiserror::Error;

use crate::reduction::Method;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {what} expected {expected}, got {got}")]
    SizeMismatch {
        what: &'static str,
        expected: String,
        got: usize,
    },

    #[error("unsupported block size {threads} for {method} reduction: {reason}")]
    UnsupportedBlockSize {
        threads: usize,
        method: Method,
        reason: &'static str,
    },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn size(what: &'static str, expected: impl Into<String>, got: usize) -> Error {
        Error::SizeMismatch {
            what,
            expected: expected.into(),
            got,
        }
    }
}
