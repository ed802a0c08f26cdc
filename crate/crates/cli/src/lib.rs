//! Command-line front end: run configurations, reports and exit codes.

pub mod args;
pub mod config;
pub mod run;

pub use config::{Formula, Pipeline, RunConfig, SCHEMA_VERSION};
pub use run::{exit, run, Report, Verdict};
