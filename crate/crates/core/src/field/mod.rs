//! Exact scalars: rationals and the non-Archimedean field `ℝ(ε)`.

mod nonstd;
mod poly;
mod rational;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub use nonstd::{ArithOp, EpsOrder, Magnitude, NonstdNumber};
pub use poly::EpsPolynomial;
pub use rational::{display_rational, format_rational, int, parse_rational, rat, Rational};

use crate::error::{Error, Result};

/// Ordered field element usable as a probability mass.
pub trait Scalar:
    Clone
    + Debug
    + Ord
    + Eq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: Rational) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn checked_div(&self, other: &Self) -> Result<Self>;
    fn standard_part(&self) -> Result<Rational>;
    /// `st(self / other)`
    fn ratio_standard_part(&self, other: &Self) -> Result<Rational> {
        self.checked_div(other)?.standard_part()
    }
    fn mul_rational(&self, r: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(r.clone()))
    }
    fn is_limited(&self) -> bool {
        true
    }
}

impl Scalar for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }
    fn standard_part(&self) -> Result<Rational> {
        Ok(self.clone())
    }
    fn mul_rational(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Scalar for NonstdNumber {
    fn from_rational(r: Rational) -> Self {
        NonstdNumber::from_rational(r)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn checked_div(&self, other: &Self) -> Result<Self> {
        NonstdNumber::checked_div(self, other)
    }
    fn standard_part(&self) -> Result<Rational> {
        NonstdNumber::standard_part(self)
    }
    fn ratio_standard_part(&self, other: &Self) -> Result<Rational> {
        NonstdNumber::ratio_standard_part(self, other)
    }
    fn is_limited(&self) -> bool {
        NonstdNumber::is_limited(self)
    }
}

