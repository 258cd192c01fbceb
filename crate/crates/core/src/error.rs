use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested parameters fall outside the range where the exact
    /// computation is feasible or the bound applies.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn out_of_regime(msg: impl Into<String>) -> Error {
    Error::OutOfRegime(msg.into())
}
