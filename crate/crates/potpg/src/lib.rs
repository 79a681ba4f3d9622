//! Experiment harness for POT policy-gradient training.
//!
//! Experiment files and built-in presets ([`experiment`]), multi-run
//! orchestration ([`run`]), versioned CSV/JSON outputs ([`formats`]) and the
//! `potpg` command line ([`cli`]). The numerical work lives in `potpg-core`.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod run;

pub use error::{HarnessError, Result};
pub use experiment::{preset, BuiltEnv, EnvSpec, ExperimentSpec, Reference};
pub use run::{run_experiment, write_outputs, ExperimentOutcome, RunResult};
