//! Scenario-driven front end for the `coherent` binary.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::{execute, load_scenario, Cli, Command};
pub use error::CliError;
pub use output::Emitted;
pub use scenario::{parse_scenario, Scenario};
