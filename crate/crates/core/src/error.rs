use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("classical limit: effective-model construction undefined (gamma = 0)")]
    ClassicalLimit,

    #[error("{size} hidden nodes exceeds the exact-oracle limit of {limit}")]
    OracleLimit { size: usize, limit: usize },

    #[error("not an RBM: model has {0} hidden-hidden couplings")]
    NotAnRbm(usize),

    #[error("sample pool is empty")]
    EmptyPool,

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
