use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {num_nodes} nodes")]
    OutOfRange { node: usize, num_nodes: usize },

    #[error("invalid node pair ({src}, {dst}): endpoints must differ")]
    SelfPair { src: usize, dst: usize },

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{}: no edges found", path.display())]
    EmptyGraph { path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bridge enumeration for pair ({src}, {dst}) exceeded cap of {cap}")]
    CapExceeded { src: usize, dst: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user-supplied configuration rather than
    /// by data or the runtime environment.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
