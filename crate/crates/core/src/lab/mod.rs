//! Experiment orchestration: configs, sweeps, classification, persistence
//! and the verification suites.

pub mod config;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{LabConfig, RunSpec, SweepSpec};
pub use report::render_report;
pub use sweep::{run_cell, run_sweep, CellOutcome, PhaseCell, Regime};
pub use verify::{run_suite, CheckResult, Suite};
