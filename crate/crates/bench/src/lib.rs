//! Experiment protocol for GFK-based MIMO detection: configuration, sweeps,
//! CSV emission and scaling benchmarks.

pub mod config;
pub mod error;
pub mod experiment;
pub mod scaling;

pub use config::{ExperimentConfig, Method};
pub use error::{BenchError, Result};
