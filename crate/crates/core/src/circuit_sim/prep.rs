//! Amplitude-splitting state preparation and the LCU merge.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fixed_point::{FixedPointValue, Rounding};
use super::oracles::AngleOracle;
use super::resources::{
    clog2, head_prep_cost, lcu_cost, postselect_cost, truncated_prep_cost, ResourceCount, ResourceLedger,
};
use super::state::{AmplitudeState, StateDistance};
use crate::dirichlet_engine::{direct_power_sum, em_depth, power_sum};
use crate::error::{Error, Result};

/// Largest number of splitting levels in the truncated window.
pub const MAX_SPLIT_LEVELS: u32 = 20;

/// Real amplitudes over 2^levels leaves from per-level splitting angles;
/// `angles[m][w]` sends weight sin² to the upper half of block w.
fn split_tree(angles: &[Vec<f64>]) -> Vec<f64> {
    let mut amps = vec![1.0];
    for level in angles {
        let mut next = Vec::with_capacity(amps.len() * 2);
        for (a, theta) in amps.iter().zip(level) {
            let (s, c) = theta.sin_cos();
            next.push(a * c);
            next.push(a * s);
        }
        amps = next;
    }
    amps
}

fn real_state(n_min: u64, amps: &[f64]) -> Result<AmplitudeState> {
    AmplitudeState::new(n_min, amps.iter().map(|a| Complex64::new(*a, 0.0)).collect())
}

#[derive(Clone, Debug)]
pub struct TruncatedState {
    pub state: AmplitudeState,
    pub distance: StateDistance,
    pub resources: ResourceCount,
    /// max_w |θ̃_{w,m} − θ_{w,m}| for each level m.
    pub max_angle_errors: Vec<f64>,
}

/// Smallest admissible window start for `eps` and `beta`: n0 > ⌈β + 2c⌉.
pub fn truncated_min_start(beta: f64, eps: f64) -> u64 {
    (beta + 2.0 * em_depth(eps) as f64).ceil() as u64 + 1
}

/// (1/C₁) Σ_{n=n0}^{n0+2^k−1} n^{−β/2}|n⟩ built from k rounds of splitting.
pub fn prepare_truncated_state(n0: u64, k: u32, beta: f64, eps: f64) -> Result<TruncatedState> {
    const OP: &str = "prepare_truncated_state";
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(OP, format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(beta >= 0.0) || !beta.is_finite() || beta == 1.0 {
        return Err(Error::domain(OP, format!("beta must be finite, nonnegative and not 1, got {beta}")));
    }
    if k == 0 || k > MAX_SPLIT_LEVELS {
        return Err(Error::contract(OP, format!("k must lie in [1, {MAX_SPLIT_LEVELS}], got {k}")));
    }
    let min_start = truncated_min_start(beta, eps);
    if n0 < min_start {
        return Err(Error::contract(OP, format!("n0 = {n0} must be at least {min_start}")));
    }
    let err = eps / k as f64;
    let oracle = AngleOracle::new(n0, k, beta, err)?;
    let mut angles = Vec::with_capacity(k as usize);
    let mut max_angle_errors = Vec::with_capacity(k as usize);
    for m in 0..k {
        let level: Vec<(f64, f64)> = (0..1u64 << m)
            .into_par_iter()
            .map(|w| -> Result<(f64, f64)> {
                let est = oracle.evaluate(w, m)?;
                Ok((est.theta, (est.theta - oracle.exact_angle(w, m)?).abs()))
            })
            .collect::<Result<_>>()?;
        max_angle_errors.push(level.iter().map(|(_, e)| *e).fold(0.0, f64::max));
        angles.push(level.into_iter().map(|(theta, _)| theta).collect());
    }
    let state = real_state(n0, &split_tree(&angles))?;
    let exact = AmplitudeState::power_law(n0, 1 << k, beta)?;
    let distance = StateDistance::between(&state, &exact);
    if distance.value() > eps {
        return Err(Error::contract(
            OP,
            format!("distance {} exceeds budget {eps}", distance.value()),
        ));
    }
    Ok(TruncatedState {
        state,
        distance,
        resources: truncated_prep_cost(n0, k, beta, eps),
        max_angle_errors,
    })
}

/// Register layout for the initial state on 1..=N.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PrepLayout {
    pub n: u64,
    pub beta: f64,
    pub eps: f64,
    /// First index of the truncated window; n0 − 1 is a power of two.
    pub n0: u64,
    /// One past the last prepared index.
    pub n1: u64,
    /// Splitting levels of the truncated window (0 when only the head is used).
    pub k: u32,
    /// Levels of the head tree.
    pub head_levels: u32,
    /// Angle bits of the head rotations.
    pub head_bits: u64,
    /// N < n0: the head alone covers 1..=N.
    pub head_only: bool,
}

impl PrepLayout {
    pub fn new(n: u64, beta: f64, eps: f64) -> Result<Self> {
        const OP: &str = "prepare_initial_state";
        if n < 4 {
            return Err(Error::domain(OP, format!("N must be at least 4, got {n}")));
        }
        if !(beta > 0.0) || !beta.is_finite() || beta == 1.0 {
            return Err(Error::domain(OP, format!("beta must be positive, finite and not 1, got {beta}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain(OP, format!("eps must lie in (0, 1), got {eps}")));
        }
        let stage_eps = eps / 6.0;
        let m = (beta + 2.0 * em_depth(eps / 18.0) as f64).ceil() as u64;
        let head_span = (m + 1).next_power_of_two();
        let n0 = head_span + 1;
        if n < n0 {
            let h = n.next_power_of_two().trailing_zeros();
            return Ok(Self {
                n,
                beta,
                eps,
                n0,
                n1: (1u64 << h) + 1,
                k: 0,
                head_levels: h,
                head_bits: clog2(3.0 * h as f64 / stage_eps),
                head_only: true,
            });
        }
        let k = (n - n0 + 1).next_power_of_two().trailing_zeros().max(1);
        if k > MAX_SPLIT_LEVELS {
            return Err(Error::capacity(OP, format!("N = {n} needs {k} splitting levels")));
        }
        let h = head_span.trailing_zeros();
        Ok(Self {
            n,
            beta,
            eps,
            n0,
            n1: n0 + (1u64 << k),
            k,
            head_levels: h,
            head_bits: clog2(3.0 * h.max(1) as f64 / stage_eps),
            head_only: false,
        })
    }

    /// Precision for S(n0, n1−1) when forming the LCU weight.
    pub fn gamma_precision(&self) -> f64 {
        let stage_eps = self.eps / 6.0;
        (self.n0 as f64).powf(-self.beta) * stage_eps * stage_eps / 36.0
    }
}

/// Symbolic resource plan for the initial state, stage by stage.
pub fn initial_state_resources(n: u64, beta: f64, eps: f64) -> Result<ResourceLedger> {
    let layout = PrepLayout::new(n, beta, eps)?;
    Ok(plan(&layout))
}

fn plan(layout: &PrepLayout) -> ResourceLedger {
    let mut ledger = ResourceLedger::default();
    if !layout.head_only {
        ledger.push(
            "truncated",
            truncated_prep_cost(layout.n0, layout.k, layout.beta, layout.eps / 18.0),
        );
    }
    ledger.push("head", head_prep_cost(layout.head_levels, layout.head_bits));
    if !layout.head_only {
        ledger.push("lcu_merge", lcu_cost(layout.n1));
    }
    ledger.push("post_selection", postselect_cost(layout.n1));
    ledger
}

/// Budget check recorded for one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageCheck {
    pub stage: &'static str,
    pub distance: f64,
    pub budget: f64,
}

#[derive(Clone, Debug)]
pub struct PreparedState {
    pub state: AmplitudeState,
    pub success_prob: f64,
    pub distance: StateDistance,
    pub resources: ResourceCount,
    pub ledger: ResourceLedger,
    pub checks: Vec<StageCheck>,
    pub layout: PrepLayout,
}

/// Head state over 1..=2^h with weights n^{−β} for n ≤ cutoff and zero beyond.
fn head_state(h: u32, beta: f64, cutoff: u64, bits: u64) -> Result<Vec<f64>> {
    let len = 1u64 << h;
    let weights: Vec<f64> = (1..=len)
        .map(|n| if n <= cutoff { (n as f64).powf(-beta) } else { 0.0 })
        .collect();
    let mut angles = Vec::with_capacity(h as usize);
    for m in 0..h {
        let span = (len >> m) as usize;
        let level = (0..1usize << m)
            .map(|w| -> Result<f64> {
                let block = &weights[w * span..(w + 1) * span];
                let total: f64 = block.iter().sum();
                let upper: f64 = block[span / 2..].iter().sum();
                let exact = if total > 0.0 { (upper / total).sqrt().asin() } else { 0.0 };
                let reg = FixedPointValue::from_f64(exact / FRAC_PI_2, 1, bits as u32, Rounding::NearestEven)?;
                Ok(FRAC_PI_2 * reg.to_f64())
            })
            .collect::<Result<Vec<_>>>()?;
        angles.push(level);
    }
    Ok(split_tree(&angles))
}

fn check(checks: &mut Vec<StageCheck>, stage: &'static str, distance: f64, budget: f64) -> Result<()> {
    checks.push(StageCheck { stage, distance, budget });
    if distance > budget {
        return Err(Error::contract(stage, format!("distance {distance} exceeds stage budget {budget}")));
    }
    Ok(())
}

/// |ψ₀⟩ = (1/C) Σ_{n=1}^{N} n^{−β/2}|n⟩ via head state, truncated tail, LCU
/// merge and post-selection onto n ≤ N.
pub fn prepare_initial_state(n: u64, beta: f64, eps: f64) -> Result<PreparedState> {
    let layout = PrepLayout::new(n, beta, eps)?;
    let stage_eps = eps / 6.0;
    let ledger = plan(&layout);
    let mut checks = Vec::new();

    let extended: Vec<f64> = if layout.head_only {
        let amps = head_state(layout.head_levels, beta, n, layout.head_bits)?;
        let head = real_state(1, &amps)?;
        let exact = AmplitudeState::power_law(1, n, beta)?;
        check(&mut checks, "head", StateDistance::between(&head, &exact).value(), stage_eps / 3.0)?;
        amps
    } else {
        let head_amps = head_state(layout.head_levels, beta, u64::MAX, layout.head_bits)?;
        let head = real_state(1, &head_amps)?;
        let head_exact = AmplitudeState::power_law(1, layout.n0 - 1, beta)?;
        check(&mut checks, "head", StateDistance::between(&head, &head_exact).value(), stage_eps / 3.0)?;

        let tail = prepare_truncated_state(layout.n0, layout.k, beta, eps / 18.0)
            .map_err(|e| match e {
                Error::Contract { msg, .. } => Error::contract("truncated", msg),
                other => other,
            })?;
        checks.push(StageCheck {
            stage: "truncated",
            distance: tail.distance.value(),
            budget: eps / 18.0,
        });

        let s_head = direct_power_sum(1, layout.n0 - 1, beta);
        let s_tail = power_sum(layout.n0, layout.n1 - 1, beta, layout.gamma_precision())?;
        let gamma = (s_head / s_tail).sqrt();
        let scale = 1.0 / (1.0 + gamma * gamma).sqrt();
        let mut amps: Vec<f64> = head_amps.iter().map(|a| a * gamma * scale).collect();
        amps.extend(tail.state.amps().iter().map(|a| a.re * scale));
        let merged = real_state(1, &amps)?;
        let exact = AmplitudeState::power_law(1, layout.n1 - 1, beta)?;
        check(&mut checks, "lcu_merge", StateDistance::between(&merged, &exact).value(), stage_eps)?;
        amps
    };

    let kept = &extended[..n as usize];
    let success_prob: f64 = kept.iter().map(|a| a * a).sum();
    if success_prob < 0.5 - eps / 3.0 {
        return Err(Error::contract(
            "post_selection",
            format!("success probability {success_prob} below {}", 0.5 - eps / 3.0),
        ));
    }
    let norm = success_prob.sqrt();
    let amps: Vec<f64> = kept.iter().map(|a| a / norm).collect();
    let state = real_state(1, &amps)?;
    let exact = AmplitudeState::power_law(1, n, beta)?;
    let distance = StateDistance::between(&state, &exact);
    check(&mut checks, "prepare_initial_state", distance.value(), eps)?;
    Ok(PreparedState {
        state,
        success_prob,
        distance,
        resources: ledger.total(),
        ledger,
        checks,
        layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_truncated_state() {
        let t = prepare_truncated_state(40, 4, 0.0, 1e-4).unwrap();
        assert!(t.distance.value() <= 1e-4);
        for a in t.state.amps() {
            assert!((a.re - 0.25).abs() < 1e-4);
        }
    }

    #[test]
    fn truncated_within_budget() {
        let t = prepare_truncated_state(32, 5, 0.5, 1e-3).unwrap();
        assert!(t.distance.value() <= 1e-3);
        assert_eq!(t.state.n_min(), 32);
        assert_eq!(t.state.len(), 32);
    }

    #[test]
    fn looser_budget_is_not_closer() {
        let loose = prepare_truncated_state(32, 5, 0.5, 1e-2).unwrap();
        let tight = prepare_truncated_state(32, 5, 0.5, 1e-4).unwrap();
        assert!(loose.distance.value() >= tight.distance.value());
    }

    #[test]
    fn truncated_precondition() {
        let e = prepare_truncated_state(4, 3, 0.5, 1e-3).unwrap_err();
        assert!(matches!(e, Error::Contract { .. }));
        assert!(prepare_truncated_state(32, 0, 0.5, 1e-3).is_err());
    }

    #[test]
    fn randomized_truncated_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let k = rng.gen_range(1..=8);
            let beta = rng.gen_range(0.05..2.5);
            let eps = 10f64.powf(rng.gen_range(-6.0..-1.5));
            let n0 = truncated_min_start(beta, eps) + rng.gen_range(0..200);
            let t = prepare_truncated_state(n0, k, beta, eps).unwrap();
            let bound: f64 = t.max_angle_errors.iter().sum();
            assert!(t.distance.value() <= bound + 1e-13, "n0={n0} k={k} beta={beta} eps={eps}");
            assert!(bound <= eps);
        }
    }

    #[test]
    fn initial_state_contracts() {
        for (n, beta) in [(64, 0.5), (100, 0.5), (64, 2.0)] {
            let p = prepare_initial_state(n, beta, 1e-3).unwrap();
            assert!(p.distance.value() <= 1e-3, "N={n} beta={beta}");
            assert!(p.success_prob >= 0.5 - 1e-3 / 3.0);
            assert_eq!(p.state.len() as u64, n);
        }
        let p = prepare_initial_state(64, 0.5, 1e-3).unwrap();
        assert!(p.success_prob >= 64.0 / 125.0 - 1e-3);
    }

    #[test]
    fn small_n_uses_head_only() {
        let p = prepare_initial_state(10, 0.5, 1e-3).unwrap();
        assert!(p.layout.head_only);
        assert!(p.distance.value() <= 1e-3);
        assert_eq!(p.success_prob, 1.0);
        assert!(prepare_initial_state(3, 0.5, 1e-3).is_err());
        assert!(prepare_initial_state(64, 1.0, 1e-3).is_err());
    }

    #[test]
    fn ledger_is_additive() {
        let p = prepare_initial_state(64, 0.5, 1e-3).unwrap();
        let planned = initial_state_resources(64, 0.5, 1e-3).unwrap();
        assert_eq!(planned, p.ledger);
        let sum = p.ledger.stages.iter().fold(ResourceCount::ZERO, |acc, (_, c)| acc + *c);
        assert_eq!(sum, p.resources);
    }

    #[test]
    fn layout_window() {
        let l = PrepLayout::new(64, 0.5, 1e-3).unwrap();
        assert!((l.n0 - 1).is_power_of_two());
        assert!(l.n1 > 64);
        assert!(l.n1 - l.n0 == 1 << l.k);
        assert!(l.n0 - 1 + (1 << (l.k - 1)) <= 64);
    }
}
