//! Batch front-end for RIS phase synthesis: scenario loading, commands and
//! artifact writing.

pub mod commands;
pub mod error;
pub mod scenario;

pub use commands::{run_command, Command, RunOptions};
pub use error::CliError;
pub use scenario::{load_scenario, Resolved, Scenario};
