use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("node index {index} out of range for {node_count} nodes")]
    IndexOutOfRange { index: usize, node_count: usize },

    #[error("distance must be positive, got {0}")]
    InvalidDistance(f64),

    #[error("transmitter and receiver must differ (both {0})")]
    InvalidPair(usize),

    #[error("{path}:{line}: key `{key}`: {message}")]
    ConfigLine {
        path: PathBuf,
        line: usize,
        key: String,
        message: String,
    },

    #[error("`{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("malformed topology csv at line {line}: {message}")]
    TopologyCsv { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
