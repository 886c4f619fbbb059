use std::path::PathBuf;

/// Crate-wide error type.
///
/// `InvalidInput` covers caller mistakes (bad dimensions, bad parameters),
/// `InvalidValue` covers values that cannot be represented at the requested
/// storage precision (a NaN reaching a fixed-point store), and `Pnm` carries
/// the byte offset where image parsing failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("{path}: byte {offset}: {message}", path = .0.path.display(), offset = .0.offset, message = .0.message)]
    Pnm(PnmError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse failure for the binary netpbm formats, pinned to the first byte
/// that made the header or payload invalid.
#[derive(Debug)]
pub struct PnmError {
    pub path: PathBuf,
    pub offset: usize,
    pub message: String,
}

impl From<PnmError> for Error {
    fn from(e: PnmError) -> Self {
        Error::Pnm(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
