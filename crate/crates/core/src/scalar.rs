//! Coefficient fields for structure constants and metric jets.
//!
//! Everything polynomial in the bracket (families, jets) is generic over
//! [`Scalar`] so the same code runs in `f64` and in exact rationals.

use std::fmt::Debug;
use std::ops::Neg;

use num::traits::{FromPrimitive, Num, ToPrimitive};
use num::{BigInt, BigRational};

pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Text form that parses back to the same value.
    fn repr(&self) -> String;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn repr(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn repr(&self) -> String {
        self.to_string()
    }
}

/// Exact rational value of a finite double.
pub fn exact_rational(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}
