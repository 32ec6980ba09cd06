//! Library half of the `entrate` command: file formats, reports and the
//! subcommand implementations.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sequence;
pub mod threads;

pub use error::{CliError, CliResult};
