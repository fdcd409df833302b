//! The three sum families: the alternating partial sum S_N(s), the partition
//! sum Z = Σ n^{−β}, and windowed power sums S(a,b,β) with Euler–Maclaurin
//! acceleration. Also a reference ζ(s) for tests.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::dd::{DoubleDouble, PhaseAccumulator};
use crate::error::{Error, Result};
use crate::special_functions::{bernoulli, rs_theta_dd};

/// Largest truncation N accepted by the phase kernel (table of ln n in
/// double-double is 16 bytes per entry).
pub const MAX_KERNEL_TERMS: usize = 1 << 24;

/// Deepest Euler–Maclaurin correction supported by the Bernoulli table.
pub const MAX_EM_DEPTH: u32 = 99;

/// Neumaier compensated accumulator.
#[derive(Copy, Clone, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Closed window a..=b of the power sum Σ n^{−β}.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SumWindow {
    a: u64,
    b: u64,
    beta: f64,
}

impl SumWindow {
    pub fn new(a: u64, b: u64, beta: f64) -> Result<Self> {
        if a == 0 || a > b {
            return Err(Error::domain("sum_window", format!("need 1 <= a <= b, got a={a}, b={b}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain("sum_window", format!("beta must be positive, got {beta}")));
        }
        Ok(Self { a, b, beta })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EulerMaclaurinSum {
    pub value: f64,
    /// The same approximation before rounding to f64. For wide windows
    /// `value` alone cannot resolve eps below ulp(S).
    pub value_dd: DoubleDouble,
    pub l3: u32,
}

/// l₃ = ⌈½ log_{2π}(8/ε)⌉, at least 1.
pub fn em_depth(eps: f64) -> u32 {
    let l = (0.5 * (8.0 / eps).ln() / std::f64::consts::TAU.ln()).ceil();
    if l < 1.0 {
        1
    } else {
        l as u32
    }
}

/// Smallest lower window bound for which the certified form applies:
/// a must exceed ⌈β + 2 l₃⌉.
pub fn em_min_start(beta: f64, l3: u32) -> u64 {
    (beta + 2.0 * l3 as f64).ceil() as u64 + 1
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// B_{2r}/(2r)! for r = 1..=MAX_EM_DEPTH.
fn em_coefficients() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        (1..=MAX_EM_DEPTH)
            .map(|r| {
                let b = bernoulli(2 * r as usize).expect("index within table");
                (b / BigRational::from_integer(factorial(2 * r))).to_f64().unwrap_or(0.0)
            })
            .collect()
    })
}

/// Euler–Maclaurin approximation of S(a,b,β) with remainder below ε/2.
pub fn euler_maclaurin_sum(w: SumWindow, eps: f64) -> Result<EulerMaclaurinSum> {
    const OP: &str = "euler_maclaurin_sum";
    if w.beta == 1.0 {
        return Err(Error::domain(OP, "beta = 1 has a logarithmic integral term"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(OP, format!("eps must be positive, got {eps}")));
    }
    let l3 = em_depth(eps);
    if l3 > MAX_EM_DEPTH {
        return Err(Error::capacity(OP, format!("truncation depth {l3} exceeds {MAX_EM_DEPTH}")));
    }
    let min_a = em_min_start(w.beta, l3);
    if w.a < min_a {
        return Err(Error::validity(
            OP,
            format!("window start {} must be at least {min_a} for l3 = {l3}", w.a),
        ));
    }
    let beta = w.beta;
    let a = w.a as f64;
    let b = w.b as f64;
    // Integral and endpoint terms dominate the value, so they are formed in
    // double-double; the corrections are tiny and stay in f64.
    let one_minus = DoubleDouble::ONE.add_f64(-beta);
    let ln_a = DoubleDouble::from_f64(a).ln();
    let ln_b = DoubleDouble::from_f64(b).ln();
    let a_pow_dd = ln_a.mul_f64(-beta).exp();
    let b_pow_dd = ln_b.mul_f64(-beta).exp();
    let integral = ((ln_b * one_minus).exp() - (ln_a * one_minus).exp()) / one_minus;
    let endpoints = (a_pow_dd + b_pow_dd).mul_f64(0.5);
    let a_pow = a_pow_dd.to_f64();
    let b_pow = b_pow_dd.to_f64();

    let coeffs = em_coefficients();
    let inv_a2 = 1.0 / (a * a);
    let inv_b2 = 1.0 / (b * b);
    let mut pa = a_pow / a; // a^{−β−1}
    let mut pb = b_pow / b;
    let mut rising = beta; // Π_{i=0}^{2r−2} (β+i)
    let mut corrections = CompensatedSum::default();
    for r in 1..=l3 {
        if r > 1 {
            let k = (2 * r - 3) as f64;
            rising *= (beta + k) * (beta + k + 1.0);
        }
        corrections.add(coeffs[(r - 1) as usize] * rising * (pb - pa));
        pa *= inv_a2;
        pb *= inv_b2;
    }
    let value_dd = (integral + endpoints).add_f64(-corrections.value());
    Ok(EulerMaclaurinSum {
        value: value_dd.to_f64(),
        value_dd,
        l3,
    })
}

/// Compensated Σ_{n=a}^{b} n^{−β}, smallest terms first.
pub fn direct_power_sum(a: u64, b: u64, beta: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for n in (a..=b).rev() {
        acc.add((n as f64).powf(-beta));
    }
    acc.value()
}

/// Σ_{n=a}^{b} n^{−β} with every term and the running sum in double-double.
/// Reference for checks at precisions finer than f64 resolves.
pub fn direct_power_sum_dd(a: u64, b: u64, beta: f64) -> DoubleDouble {
    (a..=b)
        .rev()
        .map(|n| DoubleDouble::from_f64(n as f64).ln().mul_f64(-beta).exp())
        .fold(DoubleDouble::ZERO, |acc, x| acc + x)
}

/// S(a,b,β) to absolute error below ε/2: direct summation on the prefix
/// where the Euler–Maclaurin form is not certified, accelerated form on the
/// rest. β = 0 is allowed and counts terms exactly.
pub fn power_sum(a: u64, b: u64, beta: f64, eps: f64) -> Result<f64> {
    const OP: &str = "power_sum";
    if a == 0 || a > b {
        return Err(Error::domain(OP, format!("need 1 <= a <= b, got a={a}, b={b}")));
    }
    if beta == 0.0 {
        return Ok((b - a + 1) as f64);
    }
    if beta == 1.0 || !(beta > 0.0) {
        return Ok(direct_power_sum(a, b, beta));
    }
    let l3 = em_depth(eps);
    let start = em_min_start(beta, l3).max(a);
    if l3 > MAX_EM_DEPTH || start > b || b - start < 64 {
        return Ok(direct_power_sum(a, b, beta));
    }
    let head = if start > a { direct_power_sum(a, start - 1, beta) } else { 0.0 };
    let tail = euler_maclaurin_sum(SumWindow::new(start, b, beta)?, eps)?.value;
    Ok(head + tail)
}

/// Z(β) = Σ_{n=1}^{N} n^{−β}, summed with n descending.
pub fn partition_sum(beta: f64, n: usize) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("partition_sum", format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(Error::domain("partition_sum", "N must be at least 1"));
    }
    Ok(direct_power_sum(1, n as u64, beta))
}

/// Shared table of ln n in double-double, grown on demand.
fn ln_table(n: usize) -> Arc<Vec<DoubleDouble>> {
    static TABLE: OnceLock<RwLock<Arc<Vec<DoubleDouble>>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(vec![DoubleDouble::ZERO; 2])));
    {
        let current = lock.read().expect("ln table lock");
        if current.len() > n {
            return Arc::clone(&current);
        }
    }
    let mut guard = lock.write().expect("ln table lock");
    if guard.len() > n {
        return Arc::clone(&guard);
    }
    let target = (n + 1).max(2 * guard.len()).min(MAX_KERNEL_TERMS + 1).max(n + 1);
    let mut table = Vec::with_capacity(target);
    table.extend_from_slice(&guard);
    for k in table.len()..target {
        let v = if k % 2 == 0 {
            table[k / 2] + DoubleDouble::LN_2
        } else {
            DoubleDouble::from_f64(k as f64).ln()
        };
        table.push(v);
    }
    let table = Arc::new(table);
    *guard = Arc::clone(&table);
    table
}

/// Fixed (β, N) evaluator for the Dirichlet sums at many t. Term weights and
/// logarithms are computed once; each phase t·ln n is formed in double-double
/// and reduced modulo 2π before the trigonometric call.
#[derive(Clone, Debug)]
pub struct DirichletKernel {
    beta: f64,
    weights: Vec<f64>,
    ln: Arc<Vec<DoubleDouble>>,
    partition: f64,
}

impl DirichletKernel {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        const OP: &str = "dirichlet_kernel";
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(OP, format!("Re s must be positive, got {beta}")));
        }
        if n == 0 {
            return Err(Error::domain(OP, "N must be at least 1"));
        }
        if n > MAX_KERNEL_TERMS {
            return Err(Error::capacity(OP, format!("N = {n} exceeds {MAX_KERNEL_TERMS}")));
        }
        let weights: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-beta)).collect();
        let mut acc = CompensatedSum::default();
        for w in weights.iter().rev() {
            acc.add(*w);
        }
        Ok(Self {
            beta,
            weights,
            ln: ln_table(n),
            partition: acc.value(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    /// Z(β) = Σ n^{−β}; bit-identical to `partition_sum(beta, N)`.
    pub fn partition(&self) -> f64 {
        self.partition
    }

    fn sum(&self, t: f64, alternating: bool, offset: DoubleDouble) -> Complex64 {
        let phase = PhaseAccumulator::new(t);
        let offset = offset.rem_two_pi();
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for k in (0..self.weights.len()).rev() {
            let n = k + 1;
            let angle = phase.angle(offset, self.ln[n]);
            let (s, c) = angle.sin_cos();
            let w = if alternating && n % 2 == 0 {
                -self.weights[k]
            } else {
                self.weights[k]
            };
            re.add(w * c);
            im.add(w * s);
        }
        Complex64::new(re.value(), im.value())
    }

    /// S_N(β+it) = Σ (−1)^{n−1} n^{−β−it}.
    pub fn alternating(&self, t: f64) -> Complex64 {
        self.sum(t, true, DoubleDouble::ZERO)
    }

    /// Σ n^{−β−it}.
    pub fn plain(&self, t: f64) -> Complex64 {
        self.sum(t, false, DoubleDouble::ZERO)
    }

    /// e^{iθ(t)} Σ n^{−β−it}, with θ folded into each phase before reduction.
    pub fn rotated(&self, t: f64) -> Complex64 {
        self.sum(t, false, rs_theta_dd(t))
    }

    /// e^{iθ(t)} S_N(β+it).
    pub fn rotated_alternating(&self, t: f64) -> Complex64 {
        self.sum(t, true, rs_theta_dd(t))
    }

    /// e^{iθ(t)} (S_N + S_{N−1})/2 at s = β+it: the mean of the last two
    /// partial sums, whose distance to the limit is O(|s| N^{−β−1}).
    pub fn rotated_alternating_averaged(&self, t: f64) -> Complex64 {
        let theta = rs_theta_dd(t);
        let full = self.sum(t, true, theta);
        let n = self.weights.len();
        let angle = PhaseAccumulator::new(t).angle(theta.rem_two_pi(), self.ln[n]);
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        full - Complex64::from_polar(0.5 * sign * self.weights[n - 1], angle)
    }
}

/// S_N(s) = Σ_{n=1}^{N} (−1)^{n−1} n^{−s}.
pub fn alternating_partial_sum(s: Complex64, n: usize) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::domain("alternating_partial_sum", format!("Re s must be positive, got {}", s.re)));
    }
    Ok(DirichletKernel::new(s.re, n)?.alternating(s.im))
}

/// Reference ζ(s) for 0 < Re s, Re s ≠ 1, |Im s| ≤ 10⁴, by complex
/// Euler–Maclaurin summation. Uses plain f64 phases and no shared state with
/// the alternating-sum path, so it can serve as an independent check of it.
pub fn zeta_oracle(s: Complex64, eps: f64) -> Result<Complex64> {
    const OP: &str = "zeta_oracle";
    if !(s.re > 0.0) || s.re == 1.0 || !s.is_finite() {
        return Err(Error::domain(OP, format!("need Re s > 0 and Re s != 1, got {s}")));
    }
    if s.im.abs() > 1e4 {
        return Err(Error::domain(OP, format!("|Im s| = {} above 1e4", s.im.abs())));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(OP, "eps must be positive"));
    }
    let m = (s.norm() / std::f64::consts::PI).ceil() as u64 + 20;
    let mf = m as f64;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for n in (1..m).rev() {
        let v = (-s * (n as f64).ln()).exp();
        re.add(v.re);
        im.add(v.im);
    }
    let m_pow = (-s * mf.ln()).exp(); // M^{−s}
    let mut value = Complex64::new(re.value(), im.value()) + m_pow * mf / (s - 1.0) + m_pow * 0.5;
    let coeffs = em_coefficients();
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut m_term = m_pow / mf; // M^{−s−2k+1}
    let inv_m2 = 1.0 / (mf * mf);
    for k in 1..MAX_EM_DEPTH {
        let term = rising * m_term * coeffs[(k - 1) as usize];
        value += term;
        let next_rising = rising * (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        let next = next_rising * m_term * inv_m2 * coeffs[k as usize];
        let bound = next.norm() * (s + (2 * k + 1) as f64).norm() / (s.re + (2 * k + 1) as f64);
        if bound < 0.5 * eps {
            return Ok(value);
        }
        rising = next_rising;
        m_term *= inv_m2;
    }
    Err(Error::capacity(OP, format!("precision {eps:e} not reached for s = {s}")))
}
