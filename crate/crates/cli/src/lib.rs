//! Scenario-driven identity checks for the five-vector calculus.
//!
//! A scenario file fixes a chart, a metric, a connection and optional gauge
//! and (n+1)-vector sectors. [`run::run`] samples points, evaluates every
//! enabled check in parallel and returns a [`report::Report`] sorted by
//! check name.

pub mod checks;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::Report;
pub use run::{run, RunOptions};
pub use scenario::{load, Scenario, ScenarioError};
