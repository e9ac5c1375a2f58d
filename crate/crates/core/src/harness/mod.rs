//! Experiment orchestration, statistics, file formats and the CLI.

pub mod algorithms;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod record;
pub mod stats;

use std::path::PathBuf;

use thiserror::Error;

use crate::benchmarks::BenchmarkError;
use crate::ddpg::{DdpgError, Variant};
use crate::swarm::SwarmError;

pub use algorithms::{run_algorithm, Algorithm, LoadedModel};
pub use config::ExperimentConfig;
pub use experiment::{execute, run_experiment, summarize, write_outputs, ComparisonSummary, ExperimentOutput, SummaryRow};
pub use record::{Adapter, RunRecord};
pub use stats::{improvement, wilcoxon_signed_rank, StatsError, WilcoxonResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown algorithm `{0}`; valid algorithms: {valid}", valid = Algorithm::valid_names())]
    UnknownAlgorithm(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("cannot read config {}: {source}", path.display())]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("algorithm `{0}` needs a trained model file")]
    MissingModel(Algorithm),
    #[error("cannot load model {}: {source}", path.display())]
    LoadModel { path: PathBuf, source: DdpgError },
    #[error("model for `{algorithm}` was trained for the `{trained_for}` variant")]
    ModelMismatch { algorithm: Algorithm, trained_for: Variant },
    #[error("cannot write {}: {source}", path.display())]
    WriteOutput { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Ddpg(#[from] DdpgError),
    #[error(transparent)]
    Swarm(#[from] SwarmError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
