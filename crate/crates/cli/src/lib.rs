//! Experiment driver tying the chain, simulation, and stability crates
//! together behind a JSON-configured command line.
//!
//! The library half exists so integration tests can run experiments
//! in-process; the binary in `main.rs` is a thin argument parser over
//! [`runner::run_experiment`].

pub mod config;
pub mod error;
pub mod presets;
pub mod rate;
pub mod report;
pub mod runner;

pub use config::{CheckKind, ExperimentConfig, ExperimentSpec};
pub use error::{CliError, Result};
pub use report::ExperimentReport;
pub use runner::run_experiment;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
