//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. Only what the phase path needs is
//! implemented: add/sub/mul/div, exp, ln and reduction modulo 2π.
//!
//! Products use Dekker splitting rather than `f64::mul_add` so results do not
//! depend on whether the target has hardware FMA.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
pub fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Veltkamp split of `a` into two 26-bit halves.
#[inline]
pub fn split(a: f64) -> (f64, f64) {
    const C: f64 = 134217729.0; // 2^27 + 1
    let t = C * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod_split(a: f64, a_split: (f64, f64), b: f64, b_split: (f64, f64)) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = a_split;
    let (bh, bl) = b_split;
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    two_prod_split(a, split(a), b, split(b))
}

#[allow(clippy::approx_constant)]
impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: Self = Self {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const PI_OVER_8: Self = Self {
        hi: 0.39269908169872414,
        lo: 1.5308084989341915e-17,
    };
    pub const LN_2: Self = Self {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = fast_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        Self::renorm(s, e + self.lo)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    /// Exact-input product `a * b` as a double-double.
    #[inline]
    pub fn product(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        Self { hi: p, lo: e }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// exp(x) for |x| < ~700. Reduces by multiples of ln 2, then by 2^10, sums
    /// the Taylor series of expm1 and undoes the scaling with
    /// `(1+u)^2 - 1 = 2u + u^2` so small arguments keep full relative precision.
    pub fn exp(self) -> Self {
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / Self::LN_2.hi).round();
        let r = self - Self::LN_2 * Self::from_f64(k);
        let r = r.mul_f64(1.0 / 1024.0);
        // expm1(r) with |r| < 3.4e-4: 12 terms leave < 1e-45.
        let mut term = r;
        let mut sum = r;
        for j in 2..=12 {
            term = (term * r) / DoubleDouble::from_f64(j as f64);
            sum = sum + term;
        }
        let mut u = sum;
        for _ in 0..10 {
            u = u.mul_f64(2.0) + u * u;
        }
        let e = u.add_f64(1.0);
        let scale = 2f64.powi(k as i32);
        Self::new(e.hi * scale, e.lo * scale)
    }

    /// Natural logarithm of a positive double-double, one Newton step from the
    /// f64 logarithm: y + x*exp(-y) - 1.
    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let y = Self::from_f64(self.hi.ln());
        y + (self * (-y).exp()) - Self::ONE
    }

    /// Representative of `self` modulo 2π in [-π, π].
    pub fn rem_two_pi(self) -> Self {
        let k = (self.hi / Self::TWO_PI.hi).round();
        if k == 0.0 {
            return self;
        }
        let mut r = self - Self::TWO_PI.mul_f64(k);
        // The quotient estimate can be off by one near ±π.
        if r.hi > Self::PI.hi {
            r = r - Self::TWO_PI;
        } else if r.hi < -Self::PI.hi {
            r = r + Self::TWO_PI;
        }
        r
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = fast_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q, e) = fast_two_sum(q1, q2);
        Self::renorm(q, e + q3)
    }
}

/// Phase `t * ln(n)` (optionally plus an offset) held in double-double and
/// reduced modulo 2π. `t` is split once so each term costs one Dekker product.
#[derive(Copy, Clone, Debug)]
pub struct PhaseAccumulator {
    t: f64,
    t_split: (f64, f64),
}

impl PhaseAccumulator {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            t_split: split(t),
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `t * x` exactly rounded to double-double (x given in double-double).
    #[inline]
    pub fn scaled(&self, x: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod_split(self.t, self.t_split, x.hi, split(x.hi));
        DoubleDouble::renorm(p, e + self.t * x.lo)
    }

    /// `offset - t * ln_n` reduced to [-π, π], returned as a plain angle.
    #[inline]
    pub fn angle(&self, offset: DoubleDouble, ln_n: DoubleDouble) -> f64 {
        (offset - self.scaled(ln_n)).rem_two_pi().to_f64()
    }
}
