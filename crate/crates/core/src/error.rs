use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometry error in element {element}: {reason}")]
    Geometry { element: usize, reason: String },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solver failed: {0}")]
    LinearSolver(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("no crack tip in mesh: {0}")]
    NoTip(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
