//! Physical observables: the accumulated phase factor L(β,t) with its
//! free-energy density, and the generalized Loschmidt amplitude G(β,t) with
//! the Hardy Z main sum, probe expectations and the Loschmidt rate.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dd::DoubleDouble;
use crate::dirichlet_engine::{zeta_oracle, DirichletKernel};
use crate::error::{Error, Result};

/// Truncation rule for the Dirichlet sums.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NPolicy {
    Fixed(usize),
    /// N(t) = max(1, ⌊√(t/2π)⌋).
    RiemannSiegel,
}

impl NPolicy {
    pub fn resolve(&self, t: f64) -> usize {
        match *self {
            NPolicy::Fixed(n) => n,
            NPolicy::RiemannSiegel => riemann_siegel_terms(t),
        }
    }
}

/// ⌊√(|t|/2π)⌋, at least 1.
pub fn riemann_siegel_terms(t: f64) -> usize {
    let x = t.abs();
    let mut n = (x / TAU).sqrt().floor() as usize;
    // Correct the floor where the square root rounded across an integer.
    while ((n + 1) as f64).powi(2) * TAU <= x {
        n += 1;
    }
    while n > 0 && (n as f64).powi(2) * TAU > x {
        n -= 1;
    }
    n.max(1)
}

/// One evaluation record of an observable.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSample {
    pub beta: f64,
    pub t: f64,
    pub n_used: usize,
    pub value: Complex64,
    pub aux: BTreeMap<String, f64>,
}

/// −ln|x| / log₂N, with +inf when |x| underflows to zero.
fn density(abs: f64, n: usize) -> f64 {
    if abs == 0.0 {
        f64::INFINITY
    } else {
        -abs.ln() / (n as f64).log2()
    }
}

fn check_beta(beta: f64, op: &'static str) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(op, format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

fn check_density_n(n: usize, op: &'static str) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(op, "log2 N vanishes for N = 1"));
    }
    Ok(())
}

/// L(β,t) = −S_N(β+it)/Z from a prepared kernel.
pub fn accumulated_phase_with(kernel: &DirichletKernel, t: f64) -> ObservableSample {
    let value = -kernel.alternating(t) / kernel.partition();
    let abs = value.norm();
    let mut aux = BTreeMap::new();
    aux.insert("abs".to_string(), abs);
    let n = kernel.terms();
    if n >= 2 {
        aux.insert("F1".to_string(), density(abs, n));
    }
    ObservableSample {
        beta: kernel.beta(),
        t,
        n_used: n,
        value,
        aux,
    }
}

/// Average accumulated phase factor L(β,t) = −Σ(−1)^{n+1} n^{−β−it} / Z.
/// `aux` carries "abs" and, for N ≥ 2, "F1".
pub fn accumulated_phase(beta: f64, t: f64, n: usize) -> Result<ObservableSample> {
    check_beta(beta, "accumulated_phase")?;
    Ok(accumulated_phase_with(&DirichletKernel::new(beta, n)?, t))
}

/// |Z·L − (2^{1−s} − 1) ζ(s)| at s = β + it.
pub fn relation_check(beta: f64, t: f64, n: usize) -> Result<f64> {
    check_beta(beta, "relation_check")?;
    let kernel = DirichletKernel::new(beta, n)?;
    let zl = -kernel.alternating(t);
    let s = Complex64::new(beta, t);
    let zeta = zeta_oracle(s, 1e-13)?;
    let prefactor = Complex64::new(2.0, 0.0).powc(Complex64::new(1.0, 0.0) - s) - 1.0;
    Ok((zl - prefactor * zeta).norm())
}

/// F1 = −ln|L| / log₂N (+inf when |L| = 0).
pub fn free_energy_f1(beta: f64, t: f64, n: usize) -> Result<f64> {
    check_density_n(n, "free_energy_f1")?;
    let sample = accumulated_phase(beta, t, n)?;
    Ok(sample.aux["F1"])
}

/// G(β,t) from a prepared kernel. The two conjugate sums are combined as
/// (X + X̄)/(2Z), so the imaginary part is exactly zero.
pub fn loschmidt_amplitude_with(kernel: &DirichletKernel, t: f64) -> ObservableSample {
    let x = kernel.rotated(t);
    let value = (x + x.conj()) / (2.0 * kernel.partition());
    let abs = value.norm();
    let mut aux = BTreeMap::new();
    aux.insert("abs".to_string(), abs);
    let n = kernel.terms();
    if n >= 2 {
        aux.insert("F2".to_string(), 2.0 * density(abs, n));
    }
    ObservableSample {
        beta: kernel.beta(),
        t,
        n_used: n,
        value,
        aux,
    }
}

/// Generalized Loschmidt amplitude
/// G(β,t) = (e^{iθ}Σ n^{−β−it} + e^{−iθ}Σ n^{−β+it}) / (2Z).
pub fn loschmidt_amplitude(beta: f64, t: f64, policy: NPolicy) -> Result<ObservableSample> {
    const OP: &str = "loschmidt_amplitude";
    check_beta(beta, OP)?;
    if let NPolicy::RiemannSiegel = policy {
        if !(t > TAU) {
            return Err(Error::domain(OP, format!("Riemann-Siegel policy needs t > 2π, got {t}")));
        }
    }
    let n = policy.resolve(t);
    Ok(loschmidt_amplitude_with(&DirichletKernel::new(beta, n)?, t))
}

/// Main sum of the Riemann–Siegel formula, 2 Re(e^{iθ(t)} Σ_{n≤N} n^{−1/2−it}).
pub fn hardy_z_main(t: f64, n: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("hardy_z_main", format!("t must be positive, got {t}")));
    }
    Ok(hardy_z_main_with(&DirichletKernel::new(0.5, n)?, t))
}

/// Hardy Z main sum from a β = 1/2 kernel.
pub fn hardy_z_main_with(kernel: &DirichletKernel, t: f64) -> f64 {
    2.0 * kernel.rotated(t).re
}

/// Hardy Z estimated through the alternating series,
/// Re(e^{iθ(t)} S̄_N(½+it) / (1 − 2^{½−it})) where S̄_N averages the last two
/// partial sums. Unlike the main sum this converges to Z(t) as N grows at
/// fixed t.
pub fn hardy_z_eta_with(kernel: &DirichletKernel, t: f64) -> f64 {
    let angle = DoubleDouble::LN_2.mul_f64(t).rem_two_pi().to_f64();
    let factor = Complex64::new(1.0, 0.0) - Complex64::from_polar(std::f64::consts::SQRT_2, -angle);
    (kernel.rotated_alternating_averaged(t) / factor).re
}

/// See [`hardy_z_eta_with`].
pub fn hardy_z_eta(t: f64, n: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("hardy_z_eta", format!("t must be positive, got {t}")));
    }
    Ok(hardy_z_eta_with(&DirichletKernel::new(0.5, n)?, t))
}

/// Probe-qubit expectations (⟨σ_z⟩, ⟨σ_y⟩) = (Re S, Im S) with
/// S(t) = e^{iθ(t)} Σ n^{−β−it} / Z.
pub fn probe_expectations(beta: f64, t: f64, n: usize) -> Result<(f64, f64)> {
    check_beta(beta, "probe_expectations")?;
    let kernel = DirichletKernel::new(beta, n)?;
    let s = kernel.rotated(t) / kernel.partition();
    Ok((s.re, s.im))
}

/// Loschmidt rate F2 = −ln|G|² / log₂N (+inf when G = 0).
pub fn loschmidt_rate_f2(beta: f64, t: f64, n: usize) -> Result<f64> {
    check_density_n(n, "loschmidt_rate_f2")?;
    let sample = loschmidt_amplitude(beta, t, NPolicy::Fixed(n))?;
    Ok(sample.aux["F2"])
}
