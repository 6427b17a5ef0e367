//! Library side of the `losglm` command-line tool.
//!
//! The binary parses flags into a [`RunConfig`] and dispatches to one of the
//! functions in [`commands`]; keeping them here lets the integration tests
//! drive the same code paths in-process.

pub mod commands;
pub mod config;
pub mod error;
mod output;
pub mod text;

pub use config::{ConfigLayer, RunConfig};
pub use error::{CliError, Result};
