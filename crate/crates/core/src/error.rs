use thiserror::Error;

use crate::tridiag::NormEstimate;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pivot magnitude fell below the singularity threshold during banded LU.
    #[error("matrix is numerically singular (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },

    /// The 2-norm iteration did not settle; `best` is a lower bound.
    #[error("norm iteration did not converge; best lower bound {}", best.value)]
    ConvergenceFailure { best: NormEstimate },

    #[error("point lies on the curve within tolerance")]
    OnCurve,

    #[error("empty point set")]
    EmptySet,
}

pub type Result<T> = std::result::Result<T, Error>;
