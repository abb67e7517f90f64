//! Monte Carlo experiment harness for auxiliary-beam-pair angle estimation:
//! declarative experiment configs, parallel trial execution and CSV/JSON
//! reporting. The `abp-sim` binary exposes each experiment as a subcommand.

pub mod config;
pub mod experiments;
pub mod report;

use thiserror::Error;

/// Harness-level errors: configuration problems or core failures.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Core(#[from] abp_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::Core(_) => "core",
            SimError::Config(_) => "config",
            SimError::Io(_) => "io",
        }
    }
}
