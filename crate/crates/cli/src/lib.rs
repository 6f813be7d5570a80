//! Command-line front end: TOML run configuration, subcommands and exit codes.

pub mod commands;
pub mod config;
