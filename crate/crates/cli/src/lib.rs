//! Experiment runner for the mixed-CSIT sum-DoF toolkit: flag/config-file
//! ingestion, deterministic parallel sweeps, and CSV / record-stream output.
//!
//! The binary front-end is `mixcsit`; everything it does is reachable
//! through [`spec::ExperimentSpec`] and [`runner::render`] so tests can
//! check outputs byte for byte.

pub mod args;
pub mod configfile;
pub mod output;
pub mod runner;
pub mod spec;

pub use runner::{execute, render};
pub use spec::{CliError, ExperimentSpec};
