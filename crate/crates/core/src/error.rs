use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch for {field}: expected {expected} values, got {actual}")]
    ShapeMismatch {
        field: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },

    #[error("negative characteristic radicand {radicand:.6e} at c = {c}")]
    NegativeRadicand { c: f64, radicand: f64 },

    #[error("solution blew up at step {step} (t = {time:.6e}): non-finite {field} at cell {cell}")]
    BlowUp {
        step: usize,
        time: f64,
        field: &'static str,
        cell: usize,
    },

    #[error("GMRES did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    GmresNotConverged { iterations: usize, residual: f64 },

    #[error("vanishing denominator 3c^2 - 1 + alpha = {0:.3e}")]
    SingularDenominator(f64),

    #[error("zero reference norm in relative error")]
    ZeroNorm,

    #[error("radius {r} outside tabulated range [0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
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

pub type Result<T> = std::result::Result<T, Error>;
