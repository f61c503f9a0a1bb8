//! The `zpreal` command line: instance files, reports and the subcommands
//! `generate`, `verify`, `eval`, `factorize` and `cauchy`.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod instance;
pub mod report;

pub use commands::{run, Outcome};
pub use error::CliError;
