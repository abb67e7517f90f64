//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, measurement and estimation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates a structural precondition.
    #[error("configuration error: {0}")]
    Config(String),

    /// Caller passed arguments that break an interface contract (e.g. shape mismatch).
    #[error("contract error: {0}")]
    Contract(String),

    /// Both beam powers of a pair are zero; no ratio can be formed.
    #[error("degenerate measurement: both beam powers are zero")]
    DegenerateMeasurement,

    /// A probing schedule does not contain every grid beam, so some pairs
    /// cannot be located by beam ID.
    #[error("estimation incomplete: schedule is missing beam ids {missing:?}")]
    EstimationIncomplete { missing: Vec<usize> },

    /// Quantizer training received too few samples.
    #[error("training error: {0}")]
    Training(String),

    /// An analytical expression diverges at the requested operating point.
    #[error("divergent: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
