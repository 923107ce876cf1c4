//! Command-line front end for `loewner-core`: run configuration, artifact
//! writers and the verification battery.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod suites;

pub use config::{AlphaChoice, FamilyKind, RunConfig, Tolerances};
pub use report::{BatteryReport, Check, SuiteReport};
pub use suites::{run_battery, run_suite, SuiteId};
