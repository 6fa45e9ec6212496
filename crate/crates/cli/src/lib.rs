//! Batch front end for `tfem-core`: record ingestion, configuration and the
//! `simulate`, `spectrum`, `pe-table`, `converge` and `validate-matrices`
//! commands. Every data product is CSV with 17 significant digits.

pub mod commands;
pub mod config;
pub mod ingest;
pub mod output;

pub use commands::{run, CliError, Outcome};
pub use config::{CommandKind, Config, ConfigError, RawConfig};
