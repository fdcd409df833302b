//! Bernoulli numbers, complex log-gamma and digamma, the Riemann–Siegel theta
//! function and the functional-equation factor χ(s).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

pub const DEFAULT_BERNOULLI_MAX: usize = 200;

/// Exact Bernoulli numbers B_0..=B_max with B_1 = -1/2.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    values: Vec<BigRational>,
}

impl BernoulliTable {
    /// Akiyama–Tanigawa triangle. One pass over m produces every B_m; the
    /// triangle yields B_1 = +1/2, which is flipped to the -1/2 convention.
    pub fn new(max: usize) -> Self {
        let mut row: Vec<BigRational> = Vec::with_capacity(max + 1);
        let mut values = Vec::with_capacity(max + 1);
        for m in 0..=max {
            row.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
            for j in (1..=m).rev() {
                let diff = &row[j - 1] - &row[j];
                row[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
            }
            values.push(row[0].clone());
        }
        if max >= 1 {
            values[1] = -values[1].clone();
        }
        Self { values }
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, p: usize) -> Result<&BigRational> {
        self.values.get(p).ok_or_else(|| {
            Error::capacity(
                "bernoulli",
                format!("index {p} above configured maximum {}", self.max_index()),
            )
        })
    }
}

fn default_table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(DEFAULT_BERNOULLI_MAX))
}

fn default_table_f64() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        default_table()
            .values
            .iter()
            .map(|b| b.to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

/// B_p from the shared memoized table (maximum index 200).
pub fn bernoulli(p: usize) -> Result<BigRational> {
    default_table().get(p).cloned()
}

/// B_p rounded to f64.
pub fn bernoulli_f64(p: usize) -> Result<f64> {
    default_table_f64().get(p).copied().ok_or_else(|| {
        Error::capacity(
            "bernoulli",
            format!("index {p} above configured maximum {DEFAULT_BERNOULLI_MAX}"),
        )
    })
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Stirling coefficients B_{2k} / (2k (2k-1)) for k = 1..=STIRLING_TERMS.
const STIRLING_TERMS: usize = 12;
const STIRLING_MIN_MODULUS: f64 = 15.0;

fn stirling_coefficients() -> &'static [f64; STIRLING_TERMS] {
    static C: OnceLock<[f64; STIRLING_TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; STIRLING_TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            *slot = default_table_f64()[2 * (i + 1)] / (2.0 * k * (2.0 * k - 1.0));
        }
        c
    })
}

fn check_pole(z: Complex64, op: &'static str) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(op, format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::domain(op, format!("pole of Gamma at {}", z.re)));
    }
    Ok(())
}

/// Number of unit shifts that move z into the Stirling region.
fn shift_count(z: Complex64) -> usize {
    let mut k = 0usize;
    let mut w = z;
    while w.re < 1.0 || w.norm() < STIRLING_MIN_MODULUS {
        w.re += 1.0;
        k += 1;
    }
    k
}

/// Principal branch of log Γ(z), continuous in z off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z, "log_gamma")?;
    let shift = shift_count(z);
    let w = z + shift as f64;
    let ln_w = w.ln();
    let mut series = Complex64::zero();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for c in stirling_coefficients() {
        series += pow * *c;
        pow *= inv2;
    }
    let half_ln_two_pi = 0.5 * (2.0 * PI).ln();
    let mut value = (w - 0.5) * ln_w - w + half_ln_two_pi + series;
    for j in 0..shift {
        value -= (z + j as f64).ln();
    }
    Ok(value)
}

/// Digamma ψ(z) by upward recurrence and the asymptotic series.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z, "digamma")?;
    let shift = shift_count(z);
    let w = z + shift as f64;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv2;
    let mut series = Complex64::zero();
    let b = default_table_f64();
    for k in 1..=STIRLING_TERMS {
        series += pow * (b[2 * k] / (2 * k) as f64);
        pow *= inv2;
    }
    let mut value = w.ln() - inv * 0.5 - series;
    for j in 0..shift {
        value -= (z + j as f64).inv();
    }
    Ok(value)
}

/// θ(t) = Im log Γ(1/4 + it/2) − (t/2) ln π, exactly odd in t.
pub fn rs_theta(t: f64) -> f64 {
    if t < 0.0 {
        return -rs_theta(-t);
    }
    let lg = log_gamma(Complex64::new(0.25, 0.5 * t)).expect("Re = 1/4 is never a pole");
    lg.im - 0.5 * t * PI.ln()
}

const THETA_ASYMPTOTIC_FROM: f64 = 64.0;

/// θ(t) in double-double for the phase path at large t. Below
/// `THETA_ASYMPTOTIC_FROM` the f64 log-gamma route is already accurate to
/// well under 1e-13 absolute; above it the asymptotic expansion
/// (t/2)ln(t/2π) − t/2 − π/8 + Σ (1−2^{1−2k})|B_2k| / (4k(2k−1) t^{2k−1})
/// is evaluated with the leading part in double-double.
pub fn rs_theta_dd(t: f64) -> DoubleDouble {
    if t < 0.0 {
        return -rs_theta_dd(-t);
    }
    if t < THETA_ASYMPTOTIC_FROM {
        return DoubleDouble::from_f64(rs_theta(t));
    }
    let b = default_table_f64();
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut tail = 0.0;
    for k in 1..=8usize {
        let kf = k as f64;
        let c = (1.0 - 2f64.powi(1 - 2 * k as i32)) * b[2 * k].abs() / (4.0 * kf * (2.0 * kf - 1.0));
        tail += c * pow;
        pow *= inv2;
    }
    let half_t = 0.5 * t;
    let log_ratio = (DoubleDouble::from_f64(t) / DoubleDouble::TWO_PI).ln();
    log_ratio.mul_f64(half_t).add_f64(-half_t) - DoubleDouble::PI_OVER_8 + DoubleDouble::from_f64(tail)
}

/// θ'(t) = ½ Re ψ(1/4 + it/2) − ½ ln π.
pub fn rs_theta_dot(t: f64) -> f64 {
    let psi = digamma(Complex64::new(0.25, 0.5 * t.abs())).expect("Re = 1/4 is never a pole");
    0.5 * psi.re - 0.5 * PI.ln()
}

/// χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s), evaluated through the equivalent
/// ratio π^{s−1/2} Γ((1−s)/2) / Γ(s/2) in log space. On the critical line the
/// two gamma arguments are conjugate, so |χ| = 1 up to rounding.
pub fn chi(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 1.0) || !s.im.is_finite() {
        return Err(Error::domain("chi", format!("Re s = {} outside (0, 1)", s.re)));
    }
    let log_num = log_gamma((Complex64::one() - s) * 0.5)?;
    let log_den = log_gamma(s * 0.5)?;
    let log_chi = (s - 0.5) * PI.ln() + log_num - log_den;
    Ok(log_chi.exp())
}
