//! Command-line surface for zeta-dqpt: grid scans, zero location, circuit
//! verification and complexity reports written as CSV with JSON sidecars.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, NSetting, Observable, RunConfig};
pub use error::CliError;
pub use run::{execute, run, Outcome};
