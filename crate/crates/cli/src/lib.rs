//! Experiment sweeps over seeded channel realizations and their CSV/plot
//! outputs.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use config::{ConfigFile, Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use output::{emit_outputs, read_results, summarize, SummaryRow};
pub use sweep::{run, run_fig2, run_fig3, run_fig4, run_single, Row, SweepResult};
