//! Configuration ingestion and subcommand implementations behind the `param-elliptic` binary.

pub mod commands;
pub mod config;
