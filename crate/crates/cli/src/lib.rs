//! Experiment runner for the bpielm benchmark problems.
//!
//! A JSON [`config::ExperimentConfig`] selects a problem, the solvers, the
//! network and sensor sizes, the noise level, the seeds and an optional
//! sweep. [`runner::run_experiment`] executes every (sweep value, seed) job
//! and [`output::write_all`] writes `results.csv`, `summary.json` and the
//! evaluation grids.

pub mod config;
pub mod output;
pub mod runner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 1 for configuration and output problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}
