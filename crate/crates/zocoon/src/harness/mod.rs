//! Experiment pipeline: configuration, seed/grid fan-out, CSV and SVG
//! emission, and the statistical verification suite.

mod config;
mod plot;
mod runner;
mod verify;

pub use config::{parse_config_str, ExperimentSpec, Method, PlannerArgs, PlannerMode};
pub use plot::{render_loss_curves, Series};
pub use runner::{run_experiment, ExperimentOutcome, GridSummary};
pub use verify::{planner_identity_check, ulp_distance, verify_suite, CheckResult, VerifyReport};
