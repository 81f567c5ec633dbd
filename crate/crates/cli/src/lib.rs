//! Command-line front end for `squeeze-core`: argument parsing, run
//! configuration, and JSON/CSV report emission.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;

pub use cli::{run, Cli};
pub use config::RunConfig;
pub use error::CliError;
