//! Benchmark orchestration: configuration, the load → reduce → encode →
//! model → evaluate pipeline, sweeps and report files.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod sweep;

use thiserror::Error;

pub use config::{DatasetKind, DatasetSpec, ModelChoice, ReducerChoice, RunConfig, VqcSettings};
pub use output::{emit_plotdata, parse_plotdata, parse_results, write_outputs, PlotGroup, ResultRow};
pub use pipeline::{run_benchmark, DatasetInfo, FoldRecord, ModelOutcome, RunManifest, StageFailure};
pub use sweep::{run_matrix, sweep_configs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl BenchError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) => 2,
            BenchError::Runtime(_) | BenchError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
