//! Precision-generic real arithmetic.
//!
//! Every kernel in this crate is written against [`Real`], which is
//! implemented for native `f64` and for MPFR-backed [`rug::Float`]. A value
//! carries its own working precision; constants are created at the precision
//! of an existing value through [`Real::constant`], so a computation started
//! at 100 digits stays at 100 digits.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Precision {
    /// IEEE-754 binary64.
    Double,
    /// Extended precision with the given number of significant decimal digits.
    Digits(u32),
}

impl Precision {
    /// `0` maps to [`Precision::Double`], anything else to that many digits.
    pub fn from_digits(digits: u32) -> Self {
        if digits == 0 {
            Precision::Double
        } else {
            Precision::Digits(digits)
        }
    }

    pub fn digits(self) -> u32 {
        match self {
            Precision::Double => 0,
            Precision::Digits(d) => d,
        }
    }

    /// Mantissa bits, with a small guard margin for extended precision.
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::Digits(d) => (f64::from(d) * std::f64::consts::LOG2_10).ceil() as u32 + 10,
        }
    }

    /// Unit roundoff `2^(1-bits)` as an `f64`.
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            Precision::Digits(_) => 2f64.powi(1 - self.bits() as i32),
        }
    }

    pub fn is_extended(self) -> bool {
        matches!(self, Precision::Digits(_))
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => f.write_str("double"),
            Precision::Digits(d) => write!(f, "{d} digits"),
        }
    }
}

/// Arithmetic surface shared by `f64` and [`rug::Float`].
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + PartialOrd<f64>
    + PartialEq<f64>
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(value: f64, precision: Precision) -> Self;

    fn precision(&self) -> Precision;

    fn pi(precision: Precision) -> Self;

    fn sqrt(&self) -> Self;

    fn sin_cos(&self) -> (Self, Self);

    fn abs(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// `value` rounded to the precision of `self`.
    fn constant(&self, value: f64) -> Self {
        Self::from_f64(value, self.precision())
    }

    fn zero_like(&self) -> Self {
        self.constant(0.0)
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    fn unit_roundoff(&self) -> f64 {
        self.precision().unit_roundoff()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(value: f64, _precision: Precision) -> Self {
        value
    }

    fn precision(&self) -> Precision {
        Precision::Double
    }

    fn pi(_precision: Precision) -> Self {
        std::f64::consts::PI
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Real for Float {
    fn from_f64(value: f64, precision: Precision) -> Self {
        Float::with_val(precision.bits(), value)
    }

    fn precision(&self) -> Precision {
        // Inverse of `Precision::bits`; only ever fed values this module built.
        let bits = self.prec();
        if bits <= 53 {
            Precision::Double
        } else {
            Precision::Digits(((f64::from(bits - 10)) / std::f64::consts::LOG2_10).floor() as u32)
        }
    }

    fn pi(precision: Precision) -> Self {
        Float::with_val(precision.bits(), Constant::Pi)
    }

    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }

    fn sin_cos(&self) -> (Self, Self) {
        let cos = Float::new(self.prec());
        self.clone().sin_cos(cos)
    }

    fn abs(&self) -> Self {
        self.clone().abs()
    }

    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }

    fn is_finite(&self) -> bool {
        Float::is_finite(self)
    }

    fn constant(&self, value: f64) -> Self {
        Float::with_val(self.prec(), value)
    }

    fn unit_roundoff(&self) -> f64 {
        2f64.powi(1 - self.prec() as i32)
    }
}

/// Compensated (Neumaier) running sum with a fixed accumulation order.
#[derive(Debug, Clone)]
pub(crate) struct CompensatedSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> CompensatedSum<R> {
    pub(crate) fn new(zero: R) -> Self {
        Self {
            compensation: zero.clone(),
            sum: zero,
        }
    }

    pub(crate) fn add(&mut self, term: R) {
        let t = self.sum.clone() + &term;
        if self.sum.abs() >= term.abs() {
            self.compensation = self.compensation.clone() + ((self.sum.clone() - &t) + term);
        } else {
            self.compensation = self.compensation.clone() + ((term - &t) + &self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> R {
        self.sum.clone() + &self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_round_trips_through_bits() {
        for digits in [20, 30, 50, 100, 200] {
            let x = Float::from_f64(1.0, Precision::Digits(digits));
            assert_eq!(x.precision(), Precision::Digits(digits));
        }
        assert_eq!(Precision::from_digits(0), Precision::Double);
        assert_eq!(Precision::Digits(100).bits(), 343);
    }

    #[test]
    fn extended_pi_is_accurate() {
        let pi = Float::pi(Precision::Digits(60));
        let reference = "3.14159265358979323846264338327950288419716939937510582097494459";
        let text = pi.to_string_radix(10, Some(60));
        assert!(text.starts_with(&reference[..58]), "{text}");
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new(0.0f64);
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn sin_cos_matches_native_at_low_precision() {
        let x = Float::from_f64(0.7, Precision::Digits(30));
        let (s, c) = Real::sin_cos(&x);
        assert!((s.to_f64() - 0.7f64.sin()).abs() < 1e-16);
        assert!((c.to_f64() - 0.7f64.cos()).abs() < 1e-16);
    }
}
