//! Scenario files, the example gallery and JSON reports on top of
//! `barricade-core`.

pub mod gallery;
pub mod report;
pub mod runner;
pub mod scenario;

pub use report::Report;
pub use runner::{run, RunError, RunOptions};
pub use scenario::{parse_scenario, parse_str, Scenario, ScenarioError};
