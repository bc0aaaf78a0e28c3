//! Experiment runner for `primewalk`: configuration, report emission,
//! file formats and the invariant suites behind `primewalk verify`.

pub mod config;
pub mod experiments;
pub mod formats;
pub mod report;
pub mod verify;

pub use config::{ExperimentConfig, UsageError};
