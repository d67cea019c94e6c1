use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed at t = {t:.3e}: achieved error {achieved:.3e}")]
    Integration { t: f64, achieved: f64 },

    #[error("no convergence after {iterations} refinements (last change {last_change:.3e})")]
    Convergence { iterations: usize, last_change: f64 },

    #[error("moment matrix not quasi-definite at degree {degree} (rcond {rcond:.3e})")]
    QuasiDefinite { degree: usize, rcond: f64 },

    #[error("index {index} out of range (limit {limit})")]
    Range { index: i64, limit: i64 },

    #[error("constraint violated: residual {residual:.6e} exceeds tolerance {tol:.3e}")]
    Constraint { residual: f64, tol: f64 },

    #[error("singular {what}")]
    Singular { what: String },

    #[error("resonance: W_-1 - {m} I is singular")]
    Resonance { m: i64 },

    #[error("series truncation unreachable: {0}")]
    Truncation(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
