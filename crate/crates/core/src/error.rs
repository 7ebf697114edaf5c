use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-admissible parameters: |alpha1 + alpha2| = {lhs} exceeds sqrt(24 nu beta) = {rhs}")]
    NonAdmissible { lhs: f64, rhs: f64 },

    #[error("negative modulus: {name} = {value} must be >= 0")]
    NegativeModulus { name: &'static str, value: f64 },

    #[error("parameter {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown norm kind `{0}`")]
    UnknownKind(String),

    #[error("fixed-point iteration diverged at step {step} after {iterations} iterations (relative update {update:e})")]
    FixedPointDiverged {
        step: usize,
        iterations: usize,
        update: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("line search failed: no Armijo step above {min_step:e} at iteration {iteration}")]
    LineSearchFailed { iteration: usize, min_step: f64 },

    #[error("invalid configuration at `{key}`: {reason}")]
    ConfigInvalid { key: String, reason: String },

    #[error("{}: bad magic bytes, not a trajectory file", path.display())]
    MagicMismatch { path: PathBuf },

    #[error("{}: unsupported trajectory format version {version}", path.display())]
    VersionUnsupported { path: PathBuf, version: u32 },

    #[error("{}: checksum failed ({reason})", path.display())]
    ChecksumFailed { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures raised by the time integrators or the optimizer, as
    /// opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::FixedPointDiverged { .. } | Error::LineSearchFailed { .. }
        )
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
