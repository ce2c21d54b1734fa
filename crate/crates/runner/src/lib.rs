//! Experiment harness around `sos-core`: configuration, seeded single runs,
//! parallel batches with pooled normalization, parameter sweeps and CSV/JSON
//! persistence.
//!
//! Run `i` of a batch uses seed `base_seed + i`. Every output file is a pure
//! function of the configuration and the base seed; wall-clock timings are
//! only logged.

pub mod config;
pub mod experiment;
pub mod io;

use std::path::Path;

pub use config::ExperimentConfig;
pub use experiment::{
    recompute_metrics, run_batch, run_single, run_sweep, BatchSummary, CellSummary, Policy,
    SweepSummary,
};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error(transparent)]
    Core(#[from] sos_core::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

impl RunnerError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl std::fmt::Display) -> Self {
        Self::Format {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, RunnerError>;
