use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the experiment pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an invalid argument or configuration.
    #[error("usage error: {0}")]
    Usage(String),
    /// Input data is inconsistent, incomplete or malformed.
    #[error("data error: {0}")]
    Data(String),
    /// A cell of a CSV file could not be parsed.
    #[error("parse error in {path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    /// A configuration that is recognised but switched off.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// An internal invariant did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A built-in oracle check or artifact hash check failed.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code: 1 usage, 2 data, 3 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::Unsupported(_) => 1,
            Error::Verification(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
