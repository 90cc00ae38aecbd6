//! Configuration-driven experiment runner for Brenke-type Stancu operators.
//!
//! Each `cmd_*` function turns an [`ExperimentConfig`] into report text or a
//! CSV document; the binary only handles arguments and file output.

// `!(v > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_bounds, cmd_converge, cmd_eval, cmd_moments, cmd_validate, Validation};
pub use config::{ExperimentConfig, FamilyBlock};
pub use error::CliError;
