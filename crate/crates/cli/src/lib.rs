//! Command-line front end: config resolution, atomic artifact directories and the commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command};
pub use config::{Overrides, RunConfig};
pub use error::CliError;
