//! Command-line harness: experiment parameters, config files, suites and
//! machine-readable output for the `adele-core` library.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod notation;
pub mod output;
pub mod suites;
