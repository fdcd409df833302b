//! Reversible-arithmetic oracles evaluated per basis index.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::fixed_point::{ln2_scaled, pi_scaled, round_div, Dyadic, FixedPointValue, Rounding};
use super::resources::{
    angle_oracle_cost, angle_sum_eps, bisection_steps, log_oracle_cost, poly_cost, sin2_params, LogParams,
    ResourceCount,
};
use crate::dirichlet_engine::{direct_power_sum, power_sum};
use crate::error::{Error, Result};

/// Largest index accepted by the logarithm oracle.
pub const LOG_ORACLE_MAX_N: u64 = 1 << 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OutputSpec {
    pub int_bits: u32,
    pub frac_bits: u32,
    pub rounding: Rounding,
}

impl OutputSpec {
    pub fn new(int_bits: u32, frac_bits: u32) -> Self {
        Self {
            int_bits,
            frac_bits,
            rounding: Rounding::NearestEven,
        }
    }
}

fn cmp_dyadic(a: &Dyadic, b: &Dyadic) -> Ordering {
    let e = a.exp.max(b.exp);
    let x = &a.mant << (e - a.exp);
    let y = &b.mant << (e - b.exp);
    x.cmp(&y)
}

/// Σ c_j x^j with each monomial x^j built from x^{j−1}, exact until the final
/// rounding to `out`.
pub fn poly_oracle(
    coeffs: &[FixedPointValue],
    x: &FixedPointValue,
    out: OutputSpec,
) -> Result<(FixedPointValue, ResourceCount)> {
    const OP: &str = "poly_oracle";
    if coeffs.is_empty() {
        return Err(Error::domain(OP, "at least one coefficient is required"));
    }
    if out.int_bits == 0 {
        return Err(Error::domain(OP, "output needs at least one integer bit"));
    }
    let degree = coeffs.len() as u64 - 1;
    let a1 = coeffs.iter().map(|c| c.width()).max().unwrap_or(1) as u64;
    let a2 = x.width() as u64;
    let xd = x.as_dyadic();
    let mut monomial = Dyadic::one();
    let mut acc = coeffs[0].as_dyadic();
    for c in &coeffs[1..] {
        monomial = monomial.mul(&xd);
        if !c.raw().is_zero() {
            acc = acc.add(&c.as_dyadic().mul(&monomial));
        }
    }
    let value = FixedPointValue::from_dyadic(&acc, out.int_bits, out.frac_bits, out.rounding)
        .map_err(|_| Error::overflow(OP, format!("result exceeds {} integer bits", out.int_bits)))?;
    let cost = poly_cost(degree, a1, a2, out.int_bits as u64, out.frac_bits as u64);
    Ok((value, cost))
}

/// Binary logarithm on 1..=n_max to absolute error η.
#[derive(Clone, Debug)]
pub struct LogOracle {
    n_max: u64,
    eta: f64,
    params: LogParams,
    coeffs: Vec<FixedPointValue>,
    out_int_bits: u32,
}

impl LogOracle {
    pub fn new(n_max: u64, eta: f64) -> Result<Self> {
        const OP: &str = "log_oracle";
        if n_max == 0 || n_max > LOG_ORACLE_MAX_N {
            return Err(Error::domain(OP, format!("n_max must lie in [1, 2^20], got {n_max}")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain(OP, format!("eta must be positive and finite, got {eta}")));
        }
        let params = LogParams::new(n_max, eta);
        let p = params.coeff_bits as u32;
        let guard = p + 64;
        let ln2 = ln2_scaled(guard);
        let numer = BigInt::one() << (p + guard);
        let mut coeffs = vec![FixedPointValue::from_raw(1, p, BigInt::zero(), Rounding::NearestEven)?];
        for j in 1..=params.terms {
            let mag = round_div(&numer, &(&ln2 * BigInt::from(j)), Rounding::NearestEven);
            let raw = if j % 2 == 1 { mag } else { -mag };
            coeffs.push(FixedPointValue::from_raw(1, p, raw, Rounding::NearestEven)?);
        }
        let top = params.k1 + 2;
        let out_int_bits = (64 - top.leading_zeros()).max(params.sum_int_bits() as u32) + 1;
        Ok(Self {
            n_max,
            eta,
            params,
            coeffs,
            out_int_bits,
        })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn params(&self) -> LogParams {
        self.params
    }

    pub fn resources(&self) -> ResourceCount {
        log_oracle_cost(self.n_max, self.eta)
    }

    pub fn evaluate(&self, n: u64) -> Result<FixedPointValue> {
        const OP: &str = "log_oracle";
        if n == 0 || n > self.n_max {
            return Err(Error::domain(OP, format!("n must lie in [1, {}], got {n}", self.n_max)));
        }
        let frac = self.params.out_bits as u32;
        if n <= 2 {
            let raw = BigInt::from(n - 1) << frac;
            return FixedPointValue::from_raw(self.out_int_bits, frac, raw, Rounding::NearestEven);
        }
        // 3·2^{ν−1} ≤ n < 3·2^ν
        let mut nu = 0u32;
        while n >= 3u64 << nu {
            nu += 1;
        }
        let scale = nu + 1;
        let d_raw = BigInt::from(n as i64 - (1i64 << scale));
        let d = FixedPointValue::from_raw(1, scale, d_raw, Rounding::NearestEven)?;
        let spec = OutputSpec::new(self.params.sum_int_bits() as u32, frac);
        let (taylor, _) = poly_oracle(&self.coeffs, &d, spec)?;
        let raw = taylor.raw() + (BigInt::from(scale) << frac);
        FixedPointValue::from_raw(self.out_int_bits, frac, raw, Rounding::NearestEven)
    }
}

/// log₂ n to within `eta` with the oracle sized for N_max = 2^20.
pub fn log_oracle(n: u64, eta: f64) -> Result<(FixedPointValue, ResourceCount)> {
    if n == 0 || n > LOG_ORACLE_MAX_N {
        return Err(Error::domain("log_oracle", format!("n must lie in [1, 2^20], got {n}")));
    }
    let oracle = LogOracle::new(LOG_ORACLE_MAX_N, eta)?;
    Ok((oracle.evaluate(n)?, oracle.resources()))
}

/// Result of one bisection angle search.
#[derive(Clone, Debug)]
pub struct AngleEstimate {
    /// Angle register in units of π/2.
    pub quarter_turns: FixedPointValue,
    pub theta: f64,
    /// Bracket width in radians after each bisection step.
    pub widths: Vec<f64>,
    pub resources: ResourceCount,
}

/// Splitting angles arcsin √(S(a₁,b₁,β)/S(a₂,b₁,β)) for the window
/// n0..n0+2^k−1, found by bisection against a fixed-point sin² polynomial.
#[derive(Clone, Debug)]
pub struct AngleOracle {
    n0: u64,
    k: u32,
    beta: f64,
    err: f64,
    steps: u32,
    eps_sum: f64,
    sin2_coeffs: Vec<FixedPointValue>,
    sin2_out: OutputSpec,
    sum_frac_bits: u32,
    sum_int_bits: u32,
}

impl AngleOracle {
    pub fn new(n0: u64, k: u32, beta: f64, err: f64) -> Result<Self> {
        const OP: &str = "angle_oracle";
        if n0 == 0 || k == 0 || k > 20 {
            return Err(Error::domain(OP, format!("need n0 >= 1 and 1 <= k <= 20, got n0={n0}, k={k}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::domain(OP, format!("beta must be finite and nonnegative, got {beta}")));
        }
        if !(err > 0.0 && err < 1.0) {
            return Err(Error::domain(OP, format!("err must lie in (0, 1), got {err}")));
        }
        let n1 = n0 + (1u64 << k);
        let steps = bisection_steps(err) as u32;
        let (l2, r2) = sin2_params(err, n1, beta);
        let r2 = r2 as u32;
        let p = r2 + 3;
        // sin²(πφ/2) = Σ_{j≥1} (−1)^{j+1} π^{2j} φ^{2j} / (2 (2j)!)
        let pi_bits = p + 32 + 2 * l2 as u32;
        let pi = pi_scaled(pi_bits);
        let zero = FixedPointValue::from_raw(3, p, BigInt::zero(), Rounding::NearestEven)?;
        let mut coeffs = vec![zero];
        let mut pi_pow = BigInt::one();
        let mut fact = BigInt::one();
        for j in 1..=l2 {
            pi_pow = &pi_pow * &pi * &pi;
            fact = fact * BigInt::from(2 * j - 1) * BigInt::from(2 * j);
            let den = (&fact << 1) << (2 * j as u32 * pi_bits);
            let mag = round_div(&(&pi_pow << p), &den, Rounding::NearestEven);
            let raw = if j % 2 == 1 { mag } else { -mag };
            coeffs.push(FixedPointValue::from_raw(3, p, BigInt::zero(), Rounding::NearestEven)?);
            coeffs.push(FixedPointValue::from_raw(3, p, raw, Rounding::NearestEven)?);
        }
        let eps_sum = angle_sum_eps(err, n1, beta);
        let sum_frac_bits = ((8.0 / eps_sum).log2().ceil() as u32).max(1);
        let bound = ((n1 - n0) as f64 * (n0 as f64).powf(-beta)).max(2.0);
        let sum_int_bits = bound.log2().ceil() as u32 + 1;
        Ok(Self {
            n0,
            k,
            beta,
            err,
            steps,
            eps_sum,
            sin2_coeffs: coeffs,
            sin2_out: OutputSpec::new(1, r2),
            sum_frac_bits,
            sum_int_bits,
        })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn sum_precision(&self) -> f64 {
        self.eps_sum
    }

    /// (a₁, b₁, a₂): upper half start, block end, block start.
    pub fn window(&self, w: u64, m: u32) -> Result<(u64, u64, u64)> {
        if m >= self.k || w >> m != 0 {
            return Err(Error::domain(
                "angle_oracle",
                format!("need m < k = {} and w < 2^m, got m={m}, w={w}", self.k),
            ));
        }
        let span = 1u64 << (self.k - m);
        let a2 = span * w + self.n0;
        let a1 = a2 + span / 2;
        let b1 = a2 + span - 1;
        Ok((a1, b1, a2))
    }

    /// Reference angle from direct summation.
    pub fn exact_angle(&self, w: u64, m: u32) -> Result<f64> {
        let (a1, b1, a2) = self.window(w, m)?;
        let s1 = direct_power_sum(a1, b1, self.beta);
        let s2 = direct_power_sum(a2, b1, self.beta);
        Ok((s1 / s2).sqrt().asin())
    }

    fn sum_register(&self, a: u64, b: u64) -> Result<Dyadic> {
        let s = power_sum(a, b, self.beta, self.eps_sum)?;
        let v = FixedPointValue::from_f64(s, self.sum_int_bits, self.sum_frac_bits, Rounding::NearestEven)?;
        Ok(v.as_dyadic())
    }

    pub fn evaluate(&self, w: u64, m: u32) -> Result<AngleEstimate> {
        let (a1, b1, a2) = self.window(w, m)?;
        let s1 = self.sum_register(a1, b1)?;
        let s2 = self.sum_register(a2, b1)?;
        let frac = self.steps + 1;
        let mut lo = BigInt::zero();
        let mut widths = Vec::with_capacity(self.steps as usize);
        for i in 1..=self.steps {
            let mid = &lo + (BigInt::one() << (frac - i));
            let phi = FixedPointValue::from_raw(1, frac, mid.clone(), Rounding::NearestEven)?;
            let (sin2, _) = poly_oracle(&self.sin2_coeffs, &phi, self.sin2_out)?;
            if cmp_dyadic(&sin2.as_dyadic().mul(&s2), &s1) == Ordering::Less {
                lo = mid;
            }
            widths.push(FRAC_PI_2 * 2f64.powi(-(i as i32)));
        }
        let register = FixedPointValue::from_raw(1, frac, lo + BigInt::one(), Rounding::NearestEven)?;
        debug_assert!(!register.raw().is_negative());
        Ok(AngleEstimate {
            theta: FRAC_PI_2 * register.to_f64(),
            quarter_turns: register,
            widths,
            resources: angle_oracle_cost(self.n0, self.k, self.beta, self.err),
        })
    }
}

/// One splitting angle θ_{w,m} within `err`.
pub fn angle_oracle(w: u64, m: u32, k: u32, n0: u64, beta: f64, err: f64) -> Result<AngleEstimate> {
    AngleOracle::new(n0, k, beta, err)?.evaluate(w, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(x: f64, r1: u32, r2: u32) -> FixedPointValue {
        FixedPointValue::from_f64(x, r1, r2, Rounding::NearestEven).unwrap()
    }

    #[test]
    fn constant_and_square() {
        let (v, c) = poly_oracle(&[fp(1.75, 2, 4)], &fp(3.0, 3, 0), OutputSpec::new(2, 4)).unwrap();
        assert_eq!(v.to_f64(), 1.75);
        assert_eq!(c.gates, 0);
        let coeffs = [fp(0.0, 1, 0), fp(0.0, 1, 0), fp(1.0, 1, 0)];
        let (v, _) = poly_oracle(&coeffs, &fp(3.0, 3, 0), OutputSpec::new(5, 0)).unwrap();
        assert_eq!(v.to_f64(), 9.0);
    }

    #[test]
    fn output_overflow() {
        let coeffs = [fp(0.0, 1, 0), fp(0.0, 1, 0), fp(1.0, 1, 0)];
        let e = poly_oracle(&coeffs, &fp(3.0, 3, 0), OutputSpec::new(3, 0)).unwrap_err();
        assert!(matches!(e, Error::Overflow { .. }));
    }

    #[test]
    fn random_cubic_against_rational_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let coeffs: Vec<_> = (0..4).map(|_| fp(rng.gen_range(-2.0..2.0), 2, 12)).collect();
            let x = fp(rng.gen_range(-1.5..1.5), 1, 10);
            let out = OutputSpec::new(6, 9);
            let (v, _) = poly_oracle(&coeffs, &x, out).unwrap();
            let xq = x.to_rational();
            let mut exact = BigRational::zero();
            let mut pow = BigRational::one();
            for c in &coeffs {
                exact += c.to_rational() * &pow;
                pow *= &xq;
            }
            let diff = (v.to_rational() - exact).abs().to_f64().unwrap();
            assert!(diff <= 2f64.powi(-9) * 4.0, "diff {diff}");
            assert!(diff <= 2f64.powi(-10));
        }
    }

    #[test]
    fn log_special_values() {
        assert_eq!(log_oracle(1, 1e-3).unwrap().0.to_f64(), 0.0);
        assert_eq!(log_oracle(2, 1e-3).unwrap().0.to_f64(), 1.0);
        assert_eq!(log_oracle(4, 1e-3).unwrap().0.to_f64(), 2.0);
        assert_eq!(log_oracle(1 << 20, 1e-3).unwrap().0.to_f64(), 20.0);
        let v = log_oracle(3, 2f64.powi(-20)).unwrap().0.to_f64();
        assert!((v - 3f64.log2()).abs() <= 2f64.powi(-20));
        assert!(log_oracle(0, 1e-3).is_err());
        assert!(log_oracle((1 << 20) + 1, 1e-3).is_err());
    }

    #[test]
    fn log_exhaustive_sweep() {
        for e in [8, 16, 24] {
            let eta = 2f64.powi(-e);
            let oracle = LogOracle::new(1 << 12, eta).unwrap();
            for n in 1..=(1u64 << 12) {
                let v = oracle.evaluate(n).unwrap().to_f64();
                let err = (v - (n as f64).log2()).abs();
                assert!(err <= eta, "n={n} eta=2^-{e} err={err}");
            }
        }
    }

    #[test]
    fn uniform_weights_give_quarter_turn() {
        let est = angle_oracle(0, 0, 4, 10, 0.0, 1e-5).unwrap();
        assert!((est.theta - std::f64::consts::FRAC_PI_4).abs() <= 1e-5);
        let est = angle_oracle(5, 3, 4, 10, 0.0, 1e-5).unwrap();
        assert!((est.theta - std::f64::consts::FRAC_PI_4).abs() <= 1e-5);
    }

    #[test]
    fn angle_matches_direct_arcsin() {
        let oracle = AngleOracle::new(64, 6, 0.5, 1e-6).unwrap();
        let est = oracle.evaluate(0, 0).unwrap();
        let exact = oracle.exact_angle(0, 0).unwrap();
        assert!((est.theta - exact).abs() <= 1e-6, "{} vs {exact}", est.theta);
        for (i, w) in est.widths.iter().enumerate() {
            assert_eq!(*w, FRAC_PI_2 * 2f64.powi(-(i as i32 + 1)));
        }
        assert_eq!(est.widths.len() as u32, oracle.steps());
        for m in 1..6 {
            for w in [0u64, (1 << m) - 1] {
                let est = oracle.evaluate(w, m).unwrap();
                assert!((est.theta - oracle.exact_angle(w, m).unwrap()).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn window_bounds() {
        let oracle = AngleOracle::new(17, 3, 0.5, 1e-3).unwrap();
        assert_eq!(oracle.window(0, 0).unwrap(), (21, 24, 17));
        assert_eq!(oracle.window(3, 2).unwrap(), (24, 24, 23));
        assert!(oracle.window(4, 2).is_err());
        assert!(oracle.window(0, 3).is_err());
    }
}
