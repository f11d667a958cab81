//! IO, file formats and the command line front end for the chaincast
//! forecasting engine.

pub mod cli;
pub mod commands;
pub mod config_file;
pub mod error;
pub mod ingest;
pub mod output;

pub use error::CliError;
