//! Command-line front end for `bos-core`: the `spectrum`, `crosscheck` and
//! `sweep` commands and their CSV/JSON artifacts.

pub mod cli;
pub mod config;
pub mod output;
pub mod pipeline;

pub use cli::run;
pub use config::{CliError, Format, RunConfig};
