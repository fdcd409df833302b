//! Signed fixed-point registers and exact dyadic intermediates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Rounding {
    TowardZero,
    #[default]
    NearestEven,
}

/// Exact value `mant / 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let a = &self.mant << (exp - self.exp);
        let b = &other.mant << (exp - other.exp);
        Dyadic { mant: a + b, exp }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.exp)
    }

    /// Integer nearest to `self * 2^frac_bits` under `rounding`.
    pub fn scaled_integer(&self, frac_bits: u32, rounding: Rounding) -> BigInt {
        if self.exp <= frac_bits {
            return &self.mant << (frac_bits - self.exp);
        }
        round_shift(&self.mant, self.exp - frac_bits, rounding)
    }
}

/// `x / 2^shift` rounded to an integer.
fn round_shift(x: &BigInt, shift: u32, rounding: Rounding) -> BigInt {
    let divisor = BigInt::one() << shift;
    round_div(x, &divisor, rounding)
}

/// `num / den` (den > 0) rounded to an integer.
pub fn round_div(num: &BigInt, den: &BigInt, rounding: Rounding) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    match rounding {
        Rounding::TowardZero => {
            if num.is_negative() && !r.is_zero() {
                q + 1
            } else {
                q
            }
        }
        Rounding::NearestEven => {
            let twice = &r << 1;
            if twice > *den || (twice == *den && q.is_odd()) {
                q + 1
            } else {
                q
            }
        }
    }
}

/// Signed fixed-point value with `int_bits` integer bits and `frac_bits`
/// fractional bits; the raw integer occupies int_bits + frac_bits + 1 bits in
/// two's complement and decodes to raw / 2^frac_bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointValue {
    int_bits: u32,
    frac_bits: u32,
    raw: BigInt,
    rounding: Rounding,
}

impl FixedPointValue {
    pub fn from_raw(int_bits: u32, frac_bits: u32, raw: BigInt, rounding: Rounding) -> Result<Self> {
        if int_bits == 0 {
            return Err(Error::domain("fixed_point", "at least one integer bit is required"));
        }
        let limit = BigInt::one() << (int_bits + frac_bits);
        if raw >= limit || raw < -&limit {
            return Err(Error::overflow(
                "fixed_point",
                format!("raw value needs more than {int_bits} integer bits"),
            ));
        }
        Ok(Self {
            int_bits,
            frac_bits,
            raw,
            rounding,
        })
    }

    pub fn from_dyadic(value: &Dyadic, int_bits: u32, frac_bits: u32, rounding: Rounding) -> Result<Self> {
        Self::from_raw(int_bits, frac_bits, value.scaled_integer(frac_bits, rounding), rounding)
    }

    pub fn from_rational(value: &BigRational, int_bits: u32, frac_bits: u32, rounding: Rounding) -> Result<Self> {
        let num = value.numer() << frac_bits;
        let raw = round_div(&num, value.denom(), rounding);
        Self::from_raw(int_bits, frac_bits, raw, rounding)
    }

    /// Rounds the exact binary value of `x`.
    pub fn from_f64(x: f64, int_bits: u32, frac_bits: u32, rounding: Rounding) -> Result<Self> {
        let q = BigRational::from_float(x)
            .ok_or_else(|| Error::domain("fixed_point", format!("non-finite input {x}")))?;
        Self::from_rational(&q, int_bits, frac_bits, rounding)
    }

    pub fn from_integer(v: i64, int_bits: u32) -> Result<Self> {
        Self::from_raw(int_bits, 0, BigInt::from(v), Rounding::NearestEven)
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// Significant digits r1 + r2 (sign bit excluded).
    pub fn width(&self) -> u32 {
        self.int_bits + self.frac_bits
    }

    pub fn raw(&self) -> &BigInt {
        &self.raw
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn as_dyadic(&self) -> Dyadic {
        Dyadic {
            mant: self.raw.clone(),
            exp: self.frac_bits,
        }
    }

    pub fn to_rational(&self) -> BigRational {
        self.as_dyadic().to_rational()
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

fn atan_inv_scaled(x: u64, bits: u32) -> BigInt {
    // atan(1/x) * 2^bits, truncated series.
    let one = BigInt::one() << bits;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// π · 2^bits, correct to within one unit.
pub fn pi_scaled(bits: u32) -> BigInt {
    let guard = 32;
    let b = bits + guard;
    let pi = atan_inv_scaled(5, b) * 16 - atan_inv_scaled(239, b) * 4;
    pi >> guard
}

/// ln 2 · 2^bits, correct to within one unit, from Σ 1/(k 2^k).
pub fn ln2_scaled(bits: u32) -> BigInt {
    let guard = 32;
    let b = bits + guard;
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    loop {
        if k > b {
            break;
        }
        let term = (BigInt::one() << (b - k)) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    sum >> guard
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_and_overflow() {
        let v = FixedPointValue::from_raw(2, 3, BigInt::from(-13), Rounding::NearestEven).unwrap();
        assert_eq!(v.to_f64(), -13.0 / 8.0);
        assert!(FixedPointValue::from_raw(2, 3, BigInt::from(32), Rounding::NearestEven).is_err());
        assert!(FixedPointValue::from_raw(2, 3, BigInt::from(-32), Rounding::NearestEven).is_ok());
        assert!(FixedPointValue::from_raw(2, 3, BigInt::from(-33), Rounding::NearestEven).is_err());
    }

    #[test]
    fn rounding_modes() {
        let ne = |x: f64| FixedPointValue::from_f64(x, 4, 1, Rounding::NearestEven).unwrap().to_f64();
        let tz = |x: f64| FixedPointValue::from_f64(x, 4, 1, Rounding::TowardZero).unwrap().to_f64();
        assert_eq!(ne(1.25), 1.0);
        assert_eq!(ne(1.75), 2.0);
        assert_eq!(ne(-1.25), -1.0);
        assert_eq!(ne(-1.3), -1.5);
        assert_eq!(tz(1.7), 1.5);
        assert_eq!(tz(-1.7), -1.5);
    }

    #[test]
    fn constants_match_f64() {
        let pi = pi_scaled(80);
        let approx = pi.to_f64().unwrap() / 2f64.powi(80);
        assert_eq!(approx, std::f64::consts::PI);
        let l = ln2_scaled(80);
        assert_eq!(l.to_f64().unwrap() / 2f64.powi(80), std::f64::consts::LN_2);
        // Two precisions agree after truncation.
        let hi: BigInt = pi_scaled(120) >> 40;
        assert!((hi - &pi).abs() <= BigInt::one());
        let hi: BigInt = ln2_scaled(120) >> 40;
        assert!((hi - &l).abs() <= BigInt::one());
    }
}
