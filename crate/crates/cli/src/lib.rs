//! Configuration loading, simulation orchestration and output for the
//! `fermidyn` command.

pub mod app;
pub mod config;
pub mod error;
pub mod output;

pub use app::{default_csv_path, run, RunOptions, RunOutcome};
pub use config::{load_config, parse_config, RunConfig};
pub use error::{exit, CliError};
