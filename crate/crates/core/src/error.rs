//! Error type shared by every module in the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Statistics requested on data that cannot support them (single pixel,
    /// zero variance where a nonzero spread is required, ...).
    #[error("degenerate statistics: {0}")]
    DegenerateStats(String),

    #[error("insufficient painting pool: need {needed}, found {found} in-band candidates")]
    InsufficientPool { needed: usize, found: usize },

    #[error("empty painting pool")]
    EmptyPool,

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt weights file: {0}")]
    CorruptWeights(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
