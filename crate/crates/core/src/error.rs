//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed input file; carries the 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structurally invalid sentence or model (cycles, multiple roots,
    /// dangling indices).
    #[error("structure error: {0}")]
    Structure(String),

    /// A caller-supplied argument outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Inconsistent data across files (line counts, sidecar joins, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A model file that does not follow the serialization format.
    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
