//! Sweep runner for the drift-coefficient experiments: configuration,
//! execution and report files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use report::{emit_plot_data, write_report, PDE_HEADER, REPORT_HEADER};
pub use run::{run_experiment, Report, RowResult};
