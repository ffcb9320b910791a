//! Scenario files, CSV artifacts and the command-line harness around
//! `sfcmec-core`.

pub mod cli;
pub mod config;
pub mod engine;
pub mod golden;
pub mod output;
pub mod scenario_file;
pub mod sweep;
