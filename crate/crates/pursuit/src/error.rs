use std::io;
use std::path::PathBuf;

use pursuit_core::PursuitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    /// A scenario field failed validation; `path` locates it in the document.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("malformed trajectory CSV: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Core(#[from] PursuitError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error: 1 for bad input, 3 when a
    /// prediction is refused for an unstable swarm, 2 for anything that
    /// failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Read { .. } | Error::Invalid { .. } | Error::MalformedCsv(_) => 1,
            Error::Core(PursuitError::TooFewAgents(_) | PursuitError::NonFinite(_)) => 1,
            Error::Core(PursuitError::UnstableRegime { .. }) => 3,
            _ => 2,
        }
    }
}
