//! Harness around `seqbatch`: run configs, sweeps over strategies and seeds,
//! CSV/JSON reports, ordering traces.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
