//! Phase kickback e^{−iH₀t} with H₀|n⟩ = ln n |n⟩.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::oracles::LogOracle;
use super::prep::prepare_initial_state;
use super::resources::{evolution_cost, ResourceCount};
use super::state::AmplitudeState;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EvolvedState {
    pub state: AmplitudeState,
    /// max_n |e^{−it·log̃ n} − e^{−it·ln n}| measured over the support.
    pub max_deviation: f64,
    /// 2 sin(ξ/2).
    pub bound: f64,
    pub resources: ResourceCount,
}

pub fn evolution_apply(state: &AmplitudeState, t: f64, xi: f64) -> Result<EvolvedState> {
    const OP: &str = "evolution_apply";
    if !t.is_finite() {
        return Err(Error::domain(OP, format!("t must be finite, got {t}")));
    }
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::domain(OP, format!("xi must be positive and finite, got {xi}")));
    }
    let bound = 2.0 * (0.5 * xi).sin();
    if t == 0.0 {
        return Ok(EvolvedState {
            state: state.clone(),
            max_deviation: 0.0,
            bound,
            resources: ResourceCount::ZERO,
        });
    }
    let oracle = LogOracle::new(state.n_max(), xi / t.abs())?;
    let n_min = state.n_min();
    let rotated: Vec<(Complex64, f64)> = state
        .amps()
        .par_iter()
        .enumerate()
        .map(|(i, amp)| -> Result<(Complex64, f64)> {
            let n = n_min + i as u64;
            let approx = oracle.evaluate(n)?.to_f64() * LN_2;
            let deviation = 2.0 * (0.5 * t * (approx - (n as f64).ln())).sin().abs();
            Ok((amp * Complex64::from_polar(1.0, -t * approx), deviation))
        })
        .collect::<Result<_>>()?;
    let max_deviation = rotated.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    if max_deviation > bound {
        return Err(Error::contract(
            OP,
            format!("phase deviation {max_deviation} exceeds 2 sin(xi/2) = {bound}"),
        ));
    }
    let state = AmplitudeState::new(n_min, rotated.into_iter().map(|(a, _)| a).collect())?;
    Ok(EvolvedState {
        state,
        max_deviation,
        bound,
        resources: evolution_cost(oracle.n_max(), t, xi),
    })
}

/// ⟨ψ₀|e^{−iH₀t}|ψ₀⟩ from the emulated preparation and evolution.
pub fn end_to_end_l(n: u64, beta: f64, t: f64, eps: f64, xi: f64) -> Result<Complex64> {
    let prepared = prepare_initial_state(n, beta, eps)?;
    let evolved = evolution_apply(&prepared.state, t, xi)?;
    Ok(prepared.state.inner(&evolved.state))
}
