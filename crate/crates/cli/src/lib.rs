//! Library side of the `onc` command-line tool: scenario files, and the
//! sweep, DMT, validation and packet-trace commands.

pub mod config;
pub mod demo;
pub mod dmt;
pub mod error;
pub mod sweep;
pub mod validate;

pub use config::{load_config, LoadedConfig};
pub use error::CliError;
