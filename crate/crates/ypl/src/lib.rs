//! Command-line front end for `ypl-core`: TOML configuration, verification
//! suites, period scans and JSON/CSV reports.

pub mod cli;
pub mod config;
pub mod parallel;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Overrides, RunConfig};
pub use report::{RunReport, SuiteOutcome};
pub use suites::Suite;
