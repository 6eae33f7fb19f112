use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: operand lives on a different grid")]
    GridMismatch,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular implicit operator: a - b*symbol = {value:e} at mode {mode}")]
    SingularShift { mode: usize, value: f64 },

    #[error("factorization broke down at row {row} (pivot {pivot:e})")]
    Factorization { row: usize, pivot: f64 },

    #[error("non-finite value in solution after step {step}")]
    NonFinite { step: usize },

    #[error("solution left the admissible domain at node {node}: {reason}")]
    Domain { node: usize, reason: String },

    #[error("fit did not converge: {0}")]
    Nonconvergent(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("image format error: {0}")]
    Image(String),

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
