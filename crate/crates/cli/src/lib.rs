//! Command-line front end: CSV input, run configuration, and the
//! `simulate`, `contaminate`, `detect` and `report` subcommands.

pub mod app;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod report;

pub use config::{
    OutlierSpec, ReportFormat, ResolvedRun, RunConfig, SimulationSpec, Source, OUT_DIR_ENV,
};
pub use csv::{parse_count_csv, parse_counts, CsvError};
pub use error::CliError;
