mod evolve;
mod report;
mod sweep;
mod verify;

pub use evolve::{cmd_evolve, run_point, PointOutcome};
pub use report::{cmd_report, collect_reports, render};
pub use sweep::{cmd_sweep, log_log_slope, Axis};
pub use verify::{cmd_verify, Suite};
