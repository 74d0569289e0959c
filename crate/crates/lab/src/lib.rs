//! Command-line front end for `ident-core`: run configuration, command
//! dispatch and the CSV/JSON/gnuplot file formats.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod schema;

pub use commands::run;
pub use config::{parse_config, Command, RunConfig, Settings};
pub use error::{ConfigError, LabError};
