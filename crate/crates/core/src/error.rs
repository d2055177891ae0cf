//! Error type shared across the crate.
//!
//! Failed mathematical properties are report outcomes, not errors; this enum
//! covers genuinely invalid inputs, undefined evaluations and situations
//! where a computation cannot produce a trustworthy answer.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("divergent: {what} (summability abscissa {abscissa})")]
    Divergent { what: String, abscissa: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate crossing: {0}; suggest perturbing the path by eps*I with eps = 1e-8")]
    DegenerateCrossing(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("not in ideal: {0}")]
    NotInIdeal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
