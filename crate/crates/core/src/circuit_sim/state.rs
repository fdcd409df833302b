use num_complex::Complex64;

use crate::error::{Error, Result};

/// Statevector over basis labels n_min..n_min+len−1.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeState {
    n_min: u64,
    amps: Vec<Complex64>,
}

impl AmplitudeState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(n_min: u64, amps: Vec<Complex64>) -> Result<Self> {
        const OP: &str = "amplitude_state";
        if n_min == 0 {
            return Err(Error::domain(OP, "basis offset must be positive"));
        }
        if amps.is_empty() {
            return Err(Error::domain(OP, "state needs at least one amplitude"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::contract(OP, format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { n_min, amps })
    }

    /// Normalizes nonnegative weights w_n into amplitudes √(w_n / Σw).
    pub fn from_weights(n_min: u64, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::domain("amplitude_state", "weights must be nonnegative with positive sum"));
        }
        let amps = weights.iter().map(|w| Complex64::new((w / total).sqrt(), 0.0)).collect();
        Self::new(n_min, amps)
    }

    /// (1/C) Σ n^{−β/2} |n⟩ over n_min..n_min+len−1.
    pub fn power_law(n_min: u64, len: u64, beta: f64) -> Result<Self> {
        let weights: Vec<f64> = (n_min..n_min + len).map(|n| (n as f64).powf(-beta)).collect();
        Self::from_weights(n_min, &weights)
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    pub fn n_max(&self) -> u64 {
        self.n_min + self.amps.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, n: u64) -> Complex64 {
        if n < self.n_min || n > self.n_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[(n - self.n_min) as usize]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &AmplitudeState) -> Complex64 {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max().min(other.n_max());
        if lo > hi {
            return Complex64::new(0.0, 0.0);
        }
        (lo..=hi).map(|n| self.amplitude(n).conj() * other.amplitude(n)).sum()
    }
}

/// Phase-insensitive distance √(2(1−|⟨a|b⟩|)).
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd)]
pub struct StateDistance(f64);

impl StateDistance {
    /// Evaluated as min_φ ‖a − e^{iφ}b‖ to keep small distances accurate.
    pub fn between(a: &AmplitudeState, b: &AmplitudeState) -> StateDistance {
        let overlap = b.inner(a);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let lo = a.n_min().min(b.n_min());
        let hi = a.n_max().max(b.n_max());
        let d2: f64 = (lo..=hi).map(|n| (a.amplitude(n) - phase * b.amplitude(n)).norm_sqr()).sum();
        StateDistance(d2.sqrt().min(2.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
