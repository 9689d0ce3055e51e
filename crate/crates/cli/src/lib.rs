//! Batch front-end: configuration documents, experiment orchestration and the
//! CSV/report writers.

pub mod config;
pub mod experiment;
mod output;

pub use config::{parse_config, ConfigDoc, ConfigError, KEYS};
pub use experiment::{run_experiment, ConservationSummary, ExperimentError, RunManifest};
