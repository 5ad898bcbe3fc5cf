use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex count {n}: {reason}")]
    InvalidVertexCount { n: usize, reason: &'static str },

    #[error("invalid edge probability {0}: must lie in (0, 1]")]
    InvalidProbability(f64),

    #[error("{what} has {n} qubits/vertices, above the supported maximum of {max}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: state has {state} qubits, operator has {operator}")]
    DimensionMismatch { state: usize, operator: usize },

    #[error("graph sampler gave up after {attempts} attempts: {reason}")]
    SamplerExhausted {
        attempts: usize,
        reason: &'static str,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("mismatched recipient specifications across transfer results")]
    MismatchedRecipients,

    #[error("missing cells: {}", .0.join(", "))]
    MissingCells(Vec<String>),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
