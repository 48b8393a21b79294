//! Experiment harness: configuration, sweeps, reports, plots, and the
//! acceptance verifier.

pub mod config;
pub mod plot;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{DistSpec, ExperimentConfig, PairMode};
pub use sweep::{run_sweep, ExperimentRecord, SweepOutput};
