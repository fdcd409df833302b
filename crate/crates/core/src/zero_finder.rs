//! Zeros of ζ on the critical line as critical times: sign-change scans of the
//! Hardy Z main sum, bracket refinement, minima of |L| and comparison with
//! reference zero tables.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::dirichlet_engine::DirichletKernel;
use crate::error::{Error, Result};
use crate::observables::{accumulated_phase_with, hardy_z_eta_with, hardy_z_main_with, NPolicy};

/// A sign-change bracket of a real signal, evaluated at a constant truncation.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ZeroRecord {
    pub t_low: f64,
    pub t_high: f64,
    pub t_star: f64,
    /// |signal(t_star)|.
    pub residual: f64,
    pub n_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub t_min: f64,
    pub t_max: f64,
    pub zeros: Vec<ZeroRecord>,
    /// Number of truncation increments crossed inside the window.
    pub n_boundary_events: usize,
}

/// Which real function of t is scanned for sign changes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ZetaSignal {
    /// Riemann–Siegel main sum 2 Re(e^{iθ} Σ_{n≤N} n^{−1/2−it}).
    MainSum(NPolicy),
    /// Alternating-series estimate of Z(t) at fixed N.
    Eta(usize),
}

impl ZetaSignal {
    fn policy(&self) -> NPolicy {
        match *self {
            ZetaSignal::MainSum(p) => p,
            ZetaSignal::Eta(n) => NPolicy::Fixed(n),
        }
    }
}

/// Mean gap between consecutive zeros near height t, 2π / ln(t/2π)
/// (capped at 2π where the logarithm drops below 1).
pub fn mean_zero_spacing(t: f64) -> f64 {
    TAU / (t / TAU).ln().max(1.0)
}

/// One twentieth of the mean zero spacing at the window midpoint.
pub fn default_step(t_min: f64, t_max: f64) -> f64 {
    0.05 * mean_zero_spacing(0.5 * (t_min + t_max))
}

/// Uniform grid t_min, t_min + step, …, ending exactly at t_max.
fn grid(t_min: f64, t_max: f64, step: f64) -> Vec<f64> {
    let count = ((t_max - t_min) / step - 1e-9).ceil().max(1.0) as usize;
    let mut points: Vec<f64> = (0..count).map(|i| t_min + i as f64 * step).collect();
    points.push(t_max);
    points
}

/// Kernels for every truncation the signal needs over [t_min, t_max].
struct SignalEvaluator {
    signal: ZetaSignal,
    kernels: BTreeMap<usize, DirichletKernel>,
}

impl SignalEvaluator {
    fn new(signal: ZetaSignal, t_min: f64, t_max: f64) -> Result<Self> {
        let policy = signal.policy();
        let lo = policy.resolve(t_min);
        let hi = policy.resolve(t_max);
        let mut kernels = BTreeMap::new();
        for n in lo..=hi {
            kernels.insert(n, DirichletKernel::new(0.5, n)?);
        }
        Ok(Self { signal, kernels })
    }

    fn n_at(&self, t: f64) -> usize {
        self.signal.policy().resolve(t)
    }

    fn eval(&self, t: f64, n: usize) -> f64 {
        let kernel = &self.kernels[&n];
        match self.signal {
            ZetaSignal::MainSum(_) => hardy_z_main_with(kernel, t),
            ZetaSignal::Eta(_) => hardy_z_eta_with(kernel, t),
        }
    }
}

#[inline]
fn positive(z: f64) -> bool {
    z >= 0.0
}

fn bracket(t_low: f64, t_high: f64, n: usize, eval: &SignalEvaluator) -> ZeroRecord {
    let t_star = 0.5 * (t_low + t_high);
    ZeroRecord {
        t_low,
        t_high,
        t_star,
        residual: eval.eval(t_star, n).abs(),
        n_used: n,
    }
}

/// Bracket every sign change of the Hardy Z main sum on a uniform grid.
pub fn scan_sign_changes(t_min: f64, t_max: f64, step: f64, policy: NPolicy) -> Result<ScanReport> {
    scan_signal(t_min, t_max, step, ZetaSignal::MainSum(policy))
}

/// Bracket every sign change of `signal` on a uniform grid. When the
/// truncation N(t) increments inside a grid cell, the cell is cut at the
/// increment point 2π(N+1)²: the left piece is evaluated with the old N up to
/// the cut and the right piece with the new N from the cut, so no bracket
/// straddles a jump of the sum.
pub fn scan_signal(t_min: f64, t_max: f64, step: f64, signal: ZetaSignal) -> Result<ScanReport> {
    const OP: &str = "scan_sign_changes";
    if !(t_min > 0.0) || !(t_max > t_min) || !t_max.is_finite() {
        return Err(Error::domain(OP, format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if !(step > 0.0) {
        return Err(Error::domain(OP, format!("step must be positive, got {step}")));
    }
    let limit = 0.5 * mean_zero_spacing(t_max);
    if step > limit {
        return Err(Error::domain(
            OP,
            format!("step {step} exceeds half the mean zero spacing {limit:.6} near t = {t_max}"),
        ));
    }
    if let ZetaSignal::Eta(0) | ZetaSignal::MainSum(NPolicy::Fixed(0)) = signal {
        return Err(Error::domain(OP, "N must be at least 1"));
    }
    let eval = SignalEvaluator::new(signal, t_min, t_max)?;
    let points = grid(t_min, t_max, step);
    let samples: Vec<(f64, usize, f64)> = points
        .par_iter()
        .map(|&t| {
            let n = eval.n_at(t);
            (t, n, eval.eval(t, n))
        })
        .collect();

    let mut zeros = Vec::new();
    let mut boundary_events = 0;
    for pair in samples.windows(2) {
        let (ta, na, za) = pair[0];
        let (tb, nb, zb) = pair[1];
        let (mut t, mut n, mut z) = (ta, na, za);
        while n < nb {
            let cut = TAU * ((n + 1) as f64).powi(2);
            let z_left = eval.eval(cut, n);
            if positive(z) != positive(z_left) {
                zeros.push(bracket(t, cut, n, &eval));
            }
            boundary_events += 1;
            n += 1;
            t = cut;
            z = eval.eval(cut, n);
        }
        if positive(z) != positive(zb) {
            zeros.push(bracket(t, tb, nb, &eval));
        }
    }
    Ok(ScanReport {
        t_min,
        t_max,
        zeros,
        n_boundary_events: boundary_events,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RefineMethod {
    Bisection,
    /// Secant proposals kept inside the middle 98% of the bracket, alternated
    /// with bisection steps so the width at least halves every two steps.
    SafeguardedSecant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub t_low: f64,
    pub t_high: f64,
    /// Bracket width after each iteration.
    pub widths: Vec<f64>,
}

/// Shrink a sign-change bracket of `f` until its width is at most `tol`.
pub fn refine_bracket<F: Fn(f64) -> f64>(
    f: F,
    t_low: f64,
    t_high: f64,
    tol: f64,
    method: RefineMethod,
) -> Result<Refinement> {
    const OP: &str = "refine_zero";
    if !(tol > 0.0) {
        return Err(Error::domain(OP, format!("tol must be positive, got {tol}")));
    }
    if !(t_low < t_high) {
        return Err(Error::contract(OP, format!("empty bracket [{t_low}, {t_high}]")));
    }
    let (mut lo, mut hi) = (t_low, t_high);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if positive(f_lo) == positive(f_hi) {
        return Err(Error::contract(
            OP,
            format!("no sign change on [{lo}, {hi}]: f = {f_lo:e}, {f_hi:e}"),
        ));
    }
    let mut widths = Vec::new();
    let mut iteration = 0usize;
    while hi - lo > tol {
        let w = hi - lo;
        let mid = 0.5 * (lo + hi);
        let x = match method {
            RefineMethod::SafeguardedSecant if iteration.is_multiple_of(2) && f_hi != f_lo => {
                let s = hi - f_hi * w / (f_hi - f_lo);
                s.clamp(lo + 0.01 * w, hi - 0.01 * w)
            }
            _ => mid,
        };
        if !(x > lo && x < hi) {
            break;
        }
        let fx = f(x);
        if positive(fx) == positive(f_lo) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        widths.push(hi - lo);
        iteration += 1;
    }
    Ok(Refinement {
        t_low: lo,
        t_high: hi,
        widths,
    })
}

/// Refine a bracket from a main-sum scan by bisection at the record's own N.
pub fn refine_zero(record: ZeroRecord, tol: f64) -> Result<ZeroRecord> {
    refine_signal_zero(record, tol, ZetaSignal::MainSum(NPolicy::Fixed(record.n_used)), RefineMethod::Bisection)
}

/// Refine a bracket of `signal` at the record's own N.
pub fn refine_signal_zero(
    record: ZeroRecord,
    tol: f64,
    signal: ZetaSignal,
    method: RefineMethod,
) -> Result<ZeroRecord> {
    let kernel = DirichletKernel::new(0.5, record.n_used)?;
    let f = |t: f64| match signal {
        ZetaSignal::MainSum(_) => hardy_z_main_with(&kernel, t),
        ZetaSignal::Eta(_) => hardy_z_eta_with(&kernel, t),
    };
    let r = refine_bracket(f, record.t_low, record.t_high, tol, method)?;
    let t_star = 0.5 * (r.t_low + r.t_high);
    Ok(ZeroRecord {
        t_low: r.t_low,
        t_high: r.t_high,
        t_star,
        residual: f(t_star).abs(),
        n_used: record.n_used,
    })
}

/// Default |L| threshold 3·N^{−1/2}/Z(β).
pub fn default_minimum_threshold(kernel: &DirichletKernel) -> f64 {
    3.0 / (kernel.terms() as f64).sqrt() / kernel.partition()
}

/// Golden-section search for a minimum of `f` on [a, b].
fn golden_minimum<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Local minima of |L(β,·)| on a grid, each polished by golden-section search
/// within one step on either side, kept when the polished value is below
/// `threshold` (default 3·N^{−1/2}/Z(β)).
pub fn locate_l_minima(
    beta: f64,
    t_min: f64,
    t_max: f64,
    step: f64,
    n: usize,
    threshold: Option<f64>,
) -> Result<Vec<(f64, f64)>> {
    const OP: &str = "locate_l_minima";
    if !(t_max > t_min) || !(step > 0.0) {
        return Err(Error::domain(OP, format!("bad grid [{t_min}, {t_max}] step {step}")));
    }
    let kernel = DirichletKernel::new(beta, n)?;
    let threshold = threshold.unwrap_or_else(|| default_minimum_threshold(&kernel));
    let abs_l = |t: f64| accumulated_phase_with(&kernel, t).value.norm();
    let points = grid(t_min, t_max, step);
    let values: Vec<f64> = points.par_iter().map(|&t| abs_l(t)).collect();
    let candidates: Vec<usize> = (1..values.len() - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .filter(|&i| values[i] < 10.0 * threshold)
        .collect();
    let polished: Vec<(f64, f64)> = candidates
        .par_iter()
        .map(|&i| golden_minimum(abs_l, points[i - 1], points[i + 1], 48))
        .collect();
    Ok(polished.into_iter().filter(|&(_, v)| v < threshold).collect())
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ReferenceMatch {
    pub t_star: f64,
    pub nearest_ref: f64,
    /// t_star − nearest_ref.
    pub delta_t: f64,
    /// False when the nearest reference is more than half a mean spacing away.
    pub matched: bool,
}

/// Match each found zero to the nearest reference ordinate.
pub fn compare_reference(report: &ScanReport, reference: &[f64]) -> Result<Vec<ReferenceMatch>> {
    const OP: &str = "compare_reference";
    if reference.is_empty() {
        return Err(Error::contract(OP, "reference list is empty"));
    }
    if reference.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::contract(OP, "reference list is not sorted ascending"));
    }
    Ok(report
        .zeros
        .iter()
        .map(|z| {
            let i = reference.partition_point(|&r| r < z.t_star);
            let nearest = match (i.checked_sub(1).map(|j| reference[j]), reference.get(i)) {
                (Some(a), Some(&b)) => {
                    if (z.t_star - a).abs() <= (b - z.t_star).abs() {
                        a
                    } else {
                        b
                    }
                }
                (Some(a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!("reference is non-empty"),
            };
            let delta_t = z.t_star - nearest;
            ReferenceMatch {
                t_star: z.t_star,
                nearest_ref: nearest,
                delta_t,
                matched: delta_t.abs() <= 0.5 * mean_zero_spacing(nearest),
            }
        })
        .collect())
}

/// Parse a reference zero table: one decimal ordinate per line, `#` starts a
/// comment, blank lines ignored.
pub fn parse_reference_zeros(text: &str) -> Result<Vec<f64>> {
    const OP: &str = "reference_zeros";
    let mut zeros = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            op: OP,
            line: i + 1,
            msg: format!("not a decimal number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                op: OP,
                line: i + 1,
                msg: format!("non-finite value {line:?}"),
            });
        }
        zeros.push(v);
    }
    Ok(zeros)
}
