use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inverse of zero")]
    ZeroInverse,

    #[error("reduction polynomial {poly:#x} is not irreducible of degree {degree}")]
    Reducible { degree: u32, poly: u32 },

    #[error("unsupported extension degree {0} (expected 1..=16)")]
    Degree(u32),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
