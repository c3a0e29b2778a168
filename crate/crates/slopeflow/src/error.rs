//! Error type of the runner and its mapping to process exit codes.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The scenario file is unreadable, malformed or violates a constraint.
    #[error("config error: {0}")]
    Config(String),
    /// The requested operation is outside the supported regime of `p`.
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    /// A kernel solver failed.
    #[error("solver failure: {0}")]
    Solver(slopeflow_core::Error),
    /// At least one non-skipped check failed.
    #[error("{0}")]
    ChecksFailed(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl From<slopeflow_core::Error> for Error {
    fn from(e: slopeflow_core::Error) -> Self {
        match e {
            slopeflow_core::Error::UnsupportedExponent { .. } => Error::Unsupported(e.to_string()),
            other => Error::Solver(other),
        }
    }
}

impl Error {
    /// `0` pass, `1` solver or check failure, `2` config error, `3` unsupported regime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Unsupported(_) => 3,
            Error::Solver(_) | Error::ChecksFailed(_) | Error::Io { .. } | Error::Csv { .. } => 1,
        }
    }
}
