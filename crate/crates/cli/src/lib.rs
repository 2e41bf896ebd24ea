//! Command-line front end: operator files, analysis commands and JSON reports.

pub mod commands;
pub mod fixtures;
pub mod format;
pub mod report;

use thiserror::Error;

pub use commands::{run, Cli, Command, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{input}:{line}:{column}: {message}")]
    Syntax {
        input: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{input} at {pointer}: {message}")]
    Invalid {
        input: String,
        pointer: String,
        message: String,
    },
    #[error("unknown fixture `{name}`; available: {}", available.join(", "))]
    UnknownFixture { name: String, available: Vec<String> },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] triax::Error),
}
