//! Configuration-driven experiments and the command-line operations.

pub mod commands;
pub mod config;
pub mod report;
pub mod run;

pub use config::ExperimentConfig;
pub use report::{ReportRow, RunReport};
pub use run::{check_targets, run_experiment, CheckOutcome};
