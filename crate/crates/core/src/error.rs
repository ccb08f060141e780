use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: `{field}` {reason}")]
    Config { field: String, reason: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("invalid FS table: {0}")]
    Schema(String),

    #[error("invalid action: {0}")]
    Action(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("no delay for user {user_id}: user is {status}")]
    NoDelay { user_id: usize, status: &'static str },

    #[error("shape mismatch: {0}")]
    Contract(String),

    #[error("training diverged: {0}")]
    Training(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
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
