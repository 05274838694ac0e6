//! Experiment driver for the stochastic-profit knapsack solvers: batch runs,
//! per-run result files and aggregated tables.

pub mod config;
pub mod experiment;
pub mod records;
pub mod report;
pub mod summary;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{Algorithm, BoundKind, DeltaSetting, ExperimentConfig, Fitness, PartialConfig};
pub use experiment::{collect_run_csvs, run_experiment};
pub use records::{PopulationRow, RunRecord, RunSidecar};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Instance(PathBuf, stochknap::instances::InstanceError),
    #[error(transparent)]
    Dispersion(#[from] stochknap::instances::InstanceError),
    #[error(transparent)]
    Algorithm(#[from] stochknap::algorithms::AlgorithmError),
    #[error(transparent)]
    Objective(#[from] stochknap::objectives::ObjectiveError),
    #[error(transparent)]
    Oracle(#[from] stochknap::oracle::OracleError),
    #[error("malformed run record: {0}")]
    Record(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(path.to_path_buf(), e)
    }
}
