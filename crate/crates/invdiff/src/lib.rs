//! File formats, experiment orchestration and the `invdiff` command line on
//! top of [`invdiff_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod setup;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
