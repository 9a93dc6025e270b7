//! Experiment driver behind the command-line tool: configuration, the four
//! planar experiments, figures and the verification suite.

pub mod config;
pub mod experiments;
pub mod svg;
pub mod verify;

pub use config::ExperimentConfig;
pub use experiments::{run_experiment, write_artifacts, ExperimentResult, TrialRow};
