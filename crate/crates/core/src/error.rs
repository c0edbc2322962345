use thiserror::Error;

/// Crate-wide error type. Variants are grouped by how a caller should react:
/// `Parse` and `Validation` mean the input data is bad, `Config` means the
/// requested operation was set up wrong, the rest are runtime failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("invalid data: {0}")]
    Validation(String),

    #[error("unknown offender id: {0}")]
    UnknownOffender(String),

    #[error("bad configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Compute(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn compute(msg: impl Into<String>) -> Self {
        Error::Compute(msg.into())
    }
}
