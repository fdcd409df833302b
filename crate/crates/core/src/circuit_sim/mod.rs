//! Per-basis-index emulation of the gate-level constructions: fixed-point
//! oracles, bisection angle search, amplitude-splitting preparation with an
//! LCU merge and post-selection, and phase-kickback evolution.
//!
//! Ancilla registers exist only in the resource counts; the statevector
//! ranges over the basis labels n.

mod evolution;
mod fixed_point;
mod oracles;
mod prep;
mod resources;
mod state;

pub use evolution::{end_to_end_l, evolution_apply, EvolvedState};
pub use fixed_point::{ln2_scaled, pi_scaled, Dyadic, FixedPointValue, Rounding};
pub use oracles::{
    angle_oracle, log_oracle, poly_oracle, AngleEstimate, AngleOracle, LogOracle, OutputSpec, LOG_ORACLE_MAX_N,
};
pub use prep::{
    initial_state_resources, prepare_initial_state, prepare_truncated_state, truncated_min_start, PrepLayout,
    PreparedState, StageCheck, TruncatedState, MAX_SPLIT_LEVELS,
};
pub use resources::{
    angle_oracle_cost, evolution_cost, log_oracle_cost, poly_cost, truncated_prep_cost, ResourceCount,
    ResourceLedger, CONSTANT_CONVENTION,
};
pub use state::{AmplitudeState, StateDistance};
