//! Numerical engine for the correspondence between nontrivial zeros of the
//! Riemann zeta function and dynamical quantum phase transitions.
//!
//! The crate evaluates the accumulated-phase observable L(β,t) and the
//! generalized Loschmidt amplitude G(β,t), locates their zeros, and emulates
//! the gate-level state-preparation and evolution circuits at desk scale with
//! symbolic resource accounting.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit_sim;
pub mod complexity_model;
pub mod dd;
pub mod dirichlet_engine;
pub mod error;
pub mod observables;
pub mod special_functions;
pub mod zero_finder;

pub use error::{Error, Result};
pub use num_complex::Complex64 as ComplexValue;
pub use num_rational::BigRational as RationalValue;

/// Library version recorded in CLI metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
