//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, numerics, planning and persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at flat index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "planning failed: best criterion value {best:.3e} still above tol {tol:.3e} \
         after {max_stages} stages"
    )]
    PlanningFailed {
        best: f64,
        tol: f64,
        max_stages: usize,
    },

    #[error("unstable system: spectral radius estimate {rho} >= 1")]
    Unstable { rho: f64 },

    #[error("format error in {path}: {field}")]
    Format { path: String, field: String },

    #[error("cannot access {path}: {source}")]
    FileAccess {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
