//! Config-driven experiment front-end used by the `bbandit` binary.

mod config;
mod run;

pub use config::{
    geometric_budgets, parse_config, ExperimentConfig, PolicyEntry, DEFAULT_SEED, DEFAULT_TRIALS,
    ORACLE_NAME,
};
pub use run::{
    curves_csv, diagnostics, format_bounds, run_experiment, summary_csv, write_outputs,
    ExperimentOutput, PolicyResult,
};

use thiserror::Error;

/// Front-end failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("runtime error: {0}")]
    Runtime(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for config errors, 3 for everything raised after the config was accepted.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}
