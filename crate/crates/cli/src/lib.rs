//! Experiment registry, run configuration and reports for the
//! `tensor-gauge` command.

pub mod config;
pub mod experiments;
pub mod report;

use tensor_gauge::error::GaugeError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("report schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown experiment `{0}` (see `tensor-gauge list`)")]
    UnknownExperiment(String),

    /// The library rejected the requested sizes or parameters.
    #[error(transparent)]
    Core(#[from] GaugeError),
}

/// Exit code for a run that could not be carried out.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a run with at least one failed check.
pub const EXIT_FAIL: i32 = 1;
