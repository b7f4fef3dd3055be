//! Command-line front end: configuration files, CSV and SVG output, and
//! run manifests.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod manifest;
pub mod svg;

pub use commands::{run, CliError};
pub use config::{load_config, ConfigError, RunConfig};
pub use manifest::RunManifest;
