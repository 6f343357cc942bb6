use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty trace")]
    EmptyTrace,

    #[error("cache size must be at least 1")]
    ZeroCacheSize,

    #[error("phase index {index} out of range (trace has {phases} phases)")]
    InvalidPhase { index: usize, phases: usize },

    #[error("instance exceeds brute-force budget (length {len}, k {k})")]
    BruteForceBudget { len: usize, k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no non-trivial instances")]
    NoNonTrivialInstances,

    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("column `{column}` not present in {path}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("no data rows in {0}")]
    NoRows(PathBuf),

    #[error("malformed trace file {path}: {reason}")]
    MalformedTrace { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 for configuration problems, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingFile(_)
            | Error::MissingColumn { .. }
            | Error::NoRows(_)
            | Error::MalformedTrace { .. }
            | Error::Io { .. }
            | Error::Csv(_) => 2,
            _ => 1,
        }
    }
}
