use thiserror::Error;

use crate::media_io::PgmError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("size {n} exceeds the supported limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration must hold at least one bit")]
    EmptyConfiguration,

    #[error("strategy ended after {0} terms")]
    StrategyExhausted(u64),

    #[error("iteration graph is not strongly connected")]
    NotStronglyConnected,

    #[error("no valid mode found after {tries} tries")]
    GenerationFailed { tries: usize },

    #[error("malformed decomposition: {0}")]
    Structure(String),

    #[error("secret key must not be empty")]
    EmptyKey,

    #[error("host has no least significant coefficients")]
    EmptyLsc,

    #[error("mode of size {mode} cannot be instantiated at size {requested}")]
    ModeSize { mode: usize, requested: usize },

    #[error("malformed mode file: {0}")]
    ModeFormat(String),

    #[error(transparent)]
    Pgm(#[from] PgmError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
