//! Symbolic gate and ancilla counts. Every formula uses leading constant 1.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::dirichlet_engine::em_depth;

/// Label attached to every exported count.
pub const CONSTANT_CONVENTION: &str = "O-constants fixed to 1 (conventional, not calibrated)";

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceCount {
    pub gates: u64,
    pub ancillas: u64,
}

impl ResourceCount {
    pub const ZERO: ResourceCount = ResourceCount { gates: 0, ancillas: 0 };

    pub fn new(gates: u64, ancillas: u64) -> Self {
        Self { gates, ancillas }
    }

    pub fn times(self, k: u64) -> Self {
        Self {
            gates: self.gates.saturating_mul(k),
            ancillas: self.ancillas.saturating_mul(k),
        }
    }
}

impl Add for ResourceCount {
    type Output = ResourceCount;
    fn add(self, rhs: ResourceCount) -> ResourceCount {
        ResourceCount {
            gates: self.gates.saturating_add(rhs.gates),
            ancillas: self.ancillas.saturating_add(rhs.ancillas),
        }
    }
}

impl AddAssign for ResourceCount {
    fn add_assign(&mut self, rhs: ResourceCount) {
        *self = *self + rhs;
    }
}

impl Sum for ResourceCount {
    fn sum<I: Iterator<Item = ResourceCount>>(iter: I) -> Self {
        iter.fold(ResourceCount::ZERO, Add::add)
    }
}

/// Named stage counts whose total is the composed count.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResourceLedger {
    pub stages: Vec<(String, ResourceCount)>,
}

impl ResourceLedger {
    pub fn push(&mut self, stage: impl Into<String>, count: ResourceCount) {
        self.stages.push((stage.into(), count));
    }

    pub fn total(&self) -> ResourceCount {
        self.stages.iter().map(|(_, c)| *c).sum()
    }
}

/// ⌈log₂ x⌉, never below 1.
pub fn clog2(x: f64) -> u64 {
    if !(x > 2.0) {
        return 1;
    }
    x.log2().ceil() as u64
}

/// Bits in the binary expansion of `x` from the leading one to the last one.
pub fn significant_bits(x: f64) -> u64 {
    if x == 0.0 || !x.is_finite() {
        return 1;
    }
    let bits = x.abs().to_bits();
    let exp = (bits >> 52) & 0x7ff;
    let mant = bits & ((1u64 << 52) - 1);
    let mant = if exp == 0 { mant } else { mant | (1 << 52) };
    let leading = 64 - mant.leading_zeros() as u64;
    leading - mant.trailing_zeros() as u64
}

pub fn poly_cost(degree: u64, a1: u64, a2: u64, r1: u64, r2: u64) -> ResourceCount {
    let d = degree;
    ResourceCount {
        gates: d * d * a2 * a2 + d * d * a1 * a2 + d * (r1 + r2),
        ancillas: 2 * d * a2 + a1,
    }
}

pub fn multiplier_cost(w1: u64, w2: u64) -> ResourceCount {
    ResourceCount::new(w1 * w2, w1 + w2)
}

pub fn adder_cost(width: u64) -> ResourceCount {
    ResourceCount::new(width, 1)
}

pub fn comparator_cost(width: u64) -> ResourceCount {
    ResourceCount::new(width, 1)
}

/// Parameters shared by the logarithm oracle and its count.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct LogParams {
    /// Number of partition intervals, ⌈log₂((N_max+1)/3)⌉.
    pub k1: u64,
    /// Taylor terms.
    pub terms: u64,
    /// Coefficient fractional bits.
    pub coeff_bits: u64,
    /// Output fractional bits.
    pub out_bits: u64,
}

impl LogParams {
    pub fn new(n_max: u64, eta: f64) -> Self {
        let inv = 1.0 / eta;
        let k1 = clog2((n_max as f64 + 1.0) / 3.0);
        let lg = if inv > 1.0 { inv.log2().ceil() as u64 } else { 0 };
        let coeff = if 2.0 * inv > 1.0 { (2.0 * inv).log2().ceil() as u64 } else { 0 };
        Self {
            k1,
            terms: lg + 2,
            coeff_bits: coeff.max(1),
            out_bits: lg.max(1),
        }
    }

    /// Integer bits of the Taylor sum register.
    pub fn sum_int_bits(&self) -> u64 {
        clog2(self.k1 as f64) + 2
    }
}

pub fn log_oracle_cost(n_max: u64, eta: f64) -> ResourceCount {
    let p = LogParams::new(n_max, eta);
    // Partition search over k1 intervals, then the Taylor polynomial in d.
    let search = comparator_cost(p.k1 + 2).times(p.k1);
    let poly = poly_cost(p.terms, p.coeff_bits + 1, p.k1 + 2, p.sum_int_bits(), p.out_bits);
    search + poly + adder_cost(p.sum_int_bits() + p.out_bits)
}

/// Precision for the Euler–Maclaurin evaluations feeding one angle.
pub fn angle_sum_eps(err: f64, n1: u64, beta: f64) -> f64 {
    err * err * (n1 as f64).powf(-beta) / 12.0
}

/// Degree and output precision of the sin² polynomial for one angle.
pub fn sin2_params(err: f64, n1: u64, beta: f64) -> (u64, u64) {
    let lg_n1 = (n1 as f64).log2();
    let l2 = (2.0 * (1.0 / err).log2() + (1.0 + beta) * lg_n1 + 5.0).ceil().max(1.0) as u64;
    let r2 = clog2(12.0 * (n1 as f64).powf(1.0 + beta) / (err * err));
    (l2, r2)
}

pub fn bisection_steps(err: f64) -> u64 {
    clog2(1.0 / err)
}

/// Endpoint term n^{1−β}/(1−β) evaluated from log n.
fn endpoint_cost(n0: u64, n1: u64, beta: f64, eps_s: f64) -> ResourceCount {
    let g = 1.0 / (1.0 - beta).abs();
    let lg_n1 = (n1 as f64).log2();
    let v = significant_bits(beta);
    let p1 = clog2(32.0 * (n1 as f64).powi(2) * g / eps_s);
    let log = log_oracle_cost(n1, 2f64.powi(-(p1 as i32)));
    let w_log = clog2(n1 as f64) + p1;
    let mult = multiplier_cost(w_log, clog2(n0 as f64) + v);
    let l4 = clog2(64.0 * n1 as f64 * g / eps_s);
    let a2 = p1 + clog2(n0 as f64) + clog2(n1 as f64) + v;
    let l3 = em_depth(eps_s) as f64;
    let r1 = (2.0 * l3 * lg_n1).ceil() as u64 + 1;
    let r2 = clog2(32.0 * g / eps_s);
    log + mult + poly_cost(l4, l4 + 1, a2, r1, r2)
}

/// Correction polynomial in 1/a with 2·l3 terms.
fn correction_cost(n1: u64, beta: f64, eps_s: f64) -> ResourceCount {
    let g = 1.0 / (1.0 - beta).abs();
    let l3 = em_depth(eps_s) as f64;
    let lg_n1 = (n1 as f64).log2();
    let p2 = ((1.0 / eps_s).log2() + 4.0 + 2.0 * l3 * lg_n1).ceil().max(1.0) as u64;
    let r1 = ((2.0 * g).log2() + 2.0 * l3 * lg_n1).ceil().max(1.0) as u64;
    let r2 = clog2(8.0 / eps_s);
    poly_cost(2 * l3 as u64, p2, clog2(n1 as f64), r1, r2)
}

/// One Euler–Maclaurin evaluation of S(a, b, β) on the register.
pub fn sum_oracle_cost(n0: u64, n1: u64, beta: f64, eps_s: f64) -> ResourceCount {
    let w = clog2(8.0 / eps_s) + clog2(n1 as f64);
    (endpoint_cost(n0, n1, beta, eps_s) + correction_cost(n1, beta, eps_s)).times(2) + adder_cost(w).times(3)
}

pub fn sin2_cost(n1: u64, beta: f64, err: f64) -> ResourceCount {
    let (l2, r2) = sin2_params(err, n1, beta);
    let steps = bisection_steps(err);
    poly_cost(2 * l2, r2 + 3, steps + 2, 1, r2)
}

pub fn angle_oracle_cost(n0: u64, k: u32, beta: f64, err: f64) -> ResourceCount {
    let n1 = n0 + (1u64 << k);
    let eps_s = angle_sum_eps(err, n1, beta);
    let (_, r2) = sin2_params(err, n1, beta);
    let w = clog2(8.0 / eps_s) + clog2(n1 as f64);
    let step = sum_oracle_cost(n0, n1, beta, eps_s).times(2)
        + sin2_cost(n1, beta, err)
        + multiplier_cost(r2 + 1, w)
        + comparator_cost(r2 + 1 + w);
    step.times(bisection_steps(err))
}

/// Controlled rotation by an angle register of `bits` bits.
pub fn controlled_rotation_cost(bits: u64) -> ResourceCount {
    ResourceCount::new(bits, 0)
}

pub fn truncated_prep_cost(n0: u64, k: u32, beta: f64, eps: f64) -> ResourceCount {
    let err = eps / k as f64;
    let per_level = angle_oracle_cost(n0, k, beta, err).times(2)
        + controlled_rotation_cost(bisection_steps(err) + 1);
    per_level.times(k as u64)
}

/// Direct construction of a head state over 2^h indices with `bits`-bit
/// rotation angles.
pub fn head_prep_cost(h: u32, bits: u64) -> ResourceCount {
    let rotations = (1u64 << h) - 1;
    ResourceCount::new(rotations * bits, bits)
}

pub fn lcu_cost(n1: u64) -> ResourceCount {
    ResourceCount::new(2 + clog2(n1 as f64), 1)
}

pub fn postselect_cost(n1: u64) -> ResourceCount {
    comparator_cost(clog2(n1 as f64))
}

pub fn evolution_cost(n_max: u64, t: f64, xi: f64) -> ResourceCount {
    if t == 0.0 {
        return ResourceCount::ZERO;
    }
    let eta = xi / t.abs();
    let p = LogParams::new(n_max, eta);
    let w = p.sum_int_bits() + p.out_bits;
    log_oracle_cost(n_max, eta).times(2)
        + multiplier_cost(w, significant_bits(t))
        + controlled_rotation_cost(w + clog2(t.abs() / xi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_cost_formula() {
        let c = poly_cost(3, 4, 5, 2, 6);
        assert_eq!(c.gates, 9 * 25 + 9 * 20 + 3 * 8);
        assert_eq!(c.ancillas, 30 + 4);
        assert_eq!(poly_cost(0, 7, 5, 2, 6), ResourceCount::new(0, 7));
    }

    #[test]
    fn ledger_total_is_sum() {
        let mut l = ResourceLedger::default();
        l.push("a", ResourceCount::new(3, 1));
        l.push("b", ResourceCount::new(4, 2));
        assert_eq!(l.total(), ResourceCount::new(7, 3));
    }

    #[test]
    fn significant_bit_counts() {
        assert_eq!(significant_bits(0.5), 1);
        assert_eq!(significant_bits(0.75), 2);
        assert_eq!(significant_bits(14.0), 3);
        assert_eq!(significant_bits(0.1), 52 + 1 - 0.1f64.to_bits().trailing_zeros() as u64);
    }
}
