//! Closed-form complexity bounds and the analytic bounds behind the precision
//! budgets. All O-constants are 1.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, TAU};

use crate::error::{Error, Result};

pub const CONSTANT_CONVENTION: &str = crate::circuit_sim::CONSTANT_CONVENTION;

/// The zero-region constant is not given numerically; 1 is a placeholder.
pub const REGION_CONSTANT_NOTE: &str = "Korobov-Vinogradov region constant set to 1 (placeholder)";

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityEstimate {
    pub sample_complexity_1: f64,
    pub sample_complexity_2: f64,
    /// Arguments of the polylogarithmic circuit cost, plus the unit circuit
    /// costs R_c1 and R_c2.
    pub circuit_poly_inputs: BTreeMap<String, f64>,
    /// δ⁻¹|t|^{(1−β)/2}.
    pub total_scaling: f64,
    /// R_c1·R_s1 + R_c2·R_s2.
    pub overall: f64,
    pub convention: &'static str,
}

pub fn sample_bounds(beta: f64, t: f64, delta: f64) -> Result<ComplexityEstimate> {
    const OP: &str = "sample_bounds";
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(OP, format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain(OP, format!("delta must be positive, got {delta}")));
    }
    if t == 0.0 || !t.is_finite() {
        return Err(Error::domain(OP, format!("t must be finite and nonzero, got {t}")));
    }
    let total_scaling = t.abs().powf(0.5 * (1.0 - beta)) / delta;
    let r_s1 = total_scaling / (1.0 - beta);
    let r_s2 = total_scaling / beta;
    let (r_c1, r_c2) = (1.0, 1.0);
    let mut inputs = BTreeMap::new();
    inputs.insert("log_inv_delta".to_string(), (1.0 / delta).ln());
    inputs.insert("log_abs_t".to_string(), t.abs().ln());
    inputs.insert("log_inv_one_minus_beta".to_string(), (1.0 / (1.0 - beta)).ln());
    inputs.insert("log_inv_beta".to_string(), (1.0 / beta).ln());
    inputs.insert("terms_n".to_string(), (t.abs() / TAU).sqrt().floor().max(1.0));
    inputs.insert("r_c1".to_string(), r_c1);
    inputs.insert("r_c2".to_string(), r_c2);
    Ok(ComplexityEstimate {
        sample_complexity_1: r_s1,
        sample_complexity_2: r_s2,
        circuit_poly_inputs: inputs,
        total_scaling,
        overall: r_c1 * r_s1 + r_c2 * r_s2,
        convention: CONSTANT_CONVENTION,
    })
}

/// |s|/(|2^{1−β}−1|β) + 2^{1−β} ln2 (|s|β+1)/(|2^{1−β}−1|²β²) at s = β+it.
pub fn zeta_prime_bound(beta: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain("zeta_prime_bound", format!("beta must lie in (0, 1), got {beta}")));
    }
    if !t.is_finite() {
        return Err(Error::domain("zeta_prime_bound", format!("t must be finite, got {t}")));
    }
    let s_abs = beta.hypot(t);
    let gap = ((1.0 - beta) * LN_2).exp_m1().max(LN_2 * (1.0 - beta));
    let pow = 2f64.powf(1.0 - beta);
    Ok(s_abs / (gap * beta) + pow * LN_2 * (s_abs * beta + 1.0) / (gap * gap * beta * beta))
}

/// ½ ≤ β ≤ 1 − 1/((ln t)^{2/3}(ln ln t)^{1/3}) with unit constant.
pub fn zero_region_check(beta: f64, t: f64) -> Result<bool> {
    const OP: &str = "zero_region_check";
    if !(t > std::f64::consts::E.exp()) || !t.is_finite() {
        return Err(Error::domain(OP, format!("t must exceed e^e, got {t}")));
    }
    if !beta.is_finite() {
        return Err(Error::domain(OP, format!("beta must be finite, got {beta}")));
    }
    Ok(beta >= 0.5 && beta <= zero_region_edge(t))
}

/// Upper edge of the strip at height t.
pub fn zero_region_edge(t: f64) -> f64 {
    let l = t.ln();
    1.0 - 1.0 / (l.powf(2.0 / 3.0) * l.ln().powf(1.0 / 3.0))
}

/// Exponent in |χ(β+it)| = Θ(|t|^{1/2−β}).
pub fn chi_modulus_exponent(beta: f64) -> f64 {
    0.5 - beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet_engine::zeta_oracle;
    use num_complex::Complex64;

    #[test]
    fn half_scaling() {
        let e = sample_bounds(0.5, 1e8, 0.01).unwrap();
        assert!((e.total_scaling - 1e4).abs() < 1e-8);
        assert!((e.total_scaling - 100.0 * 1e8f64.powf(0.25)).abs() < 1e-8);
        assert!((e.overall - (e.sample_complexity_1 + e.sample_complexity_2)).abs() < 1e-9);
        assert!(sample_bounds(1.0, 10.0, 0.1).is_err());
        assert!(sample_bounds(0.0, 10.0, 0.1).is_err());
    }

    #[test]
    fn near_one_limits() {
        let a = sample_bounds(0.999, 1e6, 0.1).unwrap();
        let b = sample_bounds(0.9999, 1e6, 0.1).unwrap();
        assert!(b.sample_complexity_1 > 9.0 * a.sample_complexity_1);
        assert!(b.sample_complexity_2 < 10.1 && b.sample_complexity_2 > 10.0);
    }

    #[test]
    fn higher_beta_is_cheaper() {
        for t in [10.0, 1e3, 1e9] {
            let r = sample_bounds(0.5, t, 0.1).unwrap().total_scaling / sample_bounds(0.25, t, 0.1).unwrap().total_scaling;
            assert!(r < 1.0);
            assert!((r - t.powf(0.25 - 0.375)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_bound_dominates() {
        assert!(zeta_prime_bound(0.5, 100.0).unwrap() > zeta_prime_bound(0.5, 10.0).unwrap());
        let (beta, t, h) = (0.5, 14.13, 1e-4);
        let f = |x: f64| zeta_oracle(Complex64::new(beta, x), 1e-13).unwrap();
        // d/ds = −i d/dt on a vertical line.
        let numeric = ((f(t + h) - f(t - h)) / (2.0 * h)).norm();
        let bound = zeta_prime_bound(beta, t).unwrap();
        assert!(bound.is_finite() && numeric <= bound, "{numeric} vs {bound}");
        assert!(zeta_prime_bound(0.999999, 5.0).unwrap().is_finite());
    }

    #[test]
    fn region_examples() {
        assert!(zero_region_check(0.5, 1e6).unwrap());
        assert!(!zero_region_check(0.99, 1e3).unwrap());
        assert!(!zero_region_check(0.4, 1e3).unwrap());
        assert!(zero_region_check(0.5, 10.0).is_err());
        assert!((zero_region_edge(1e3) - 0.7787).abs() < 1e-3);
    }
}
