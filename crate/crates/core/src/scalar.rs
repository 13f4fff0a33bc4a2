//! Numeric backends for benefit arithmetic.
//!
//! Every benefit value in the crate is a sum of fractions `k / req`, so the
//! computations are generic over [`Scalar`]. Floating point types are fast and
//! compare at a small tolerance; [`Rational64`] is exact and compares with
//! tolerance zero, which is what the oracle checks rely on.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Rational64;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive};

/// A number type that benefit values can be accumulated in.
pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Sum
    + 'static
{
    /// `numer / denom`. `denom` must be non-zero.
    fn ratio(numer: u64, denom: u64) -> Self;

    /// `1 / 2^exp`.
    fn half_pow(exp: u32) -> Self;

    /// Absolute tolerance used for equality and ordering decisions.
    fn tolerance() -> Self;

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::tolerance()
    }

    /// Ordering that treats values within [`Scalar::tolerance`] as equal.
    fn cmp_tol(self, other: Self) -> Ordering {
        if self.approx_eq(other) {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// `self > other` by more than the tolerance.
    fn gt_tol(self, other: Self) -> bool {
        self.cmp_tol(other) == Ordering::Greater
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn ratio(numer: u64, denom: u64) -> Self {
        numer as f64 / denom as f64
    }

    fn half_pow(exp: u32) -> Self {
        0.5f64.powi(exp.min(i32::MAX as u32) as i32)
    }

    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn ratio(numer: u64, denom: u64) -> Self {
        (numer as f64 / denom as f64) as f32
    }

    fn half_pow(exp: u32) -> Self {
        0.5f32.powi(exp.min(i32::MAX as u32) as i32)
    }

    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for Rational64 {
    fn ratio(numer: u64, denom: u64) -> Self {
        Rational64::new(numer as i64, denom as i64)
    }

    /// Exact up to `2^62`; smaller values are not representable and become zero.
    fn half_pow(exp: u32) -> Self {
        if exp > 62 {
            Rational64::from_integer(0)
        } else {
            Rational64::new(1, 1i64 << exp)
        }
    }

    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }
}
