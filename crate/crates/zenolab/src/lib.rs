//! Configuration, sweeps, verification suites and report files for absorbing-potential
//! arrival-time runs built on `zeno-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::{cmd_evolve, cmd_report, cmd_sweep, cmd_verify, Axis, Suite};
pub use config::RunConfig;
pub use error::{LabError, LabResult};
pub use io::{Check, Report};
