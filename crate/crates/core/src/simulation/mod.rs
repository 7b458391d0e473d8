//! Seeded data generators and Monte Carlo studies.

mod models;
mod report;
mod studies;

pub use models::{generate, step_level, Model, ModelSpec};
pub use report::{ExperimentReport, ReportRow};
pub use studies::*;
