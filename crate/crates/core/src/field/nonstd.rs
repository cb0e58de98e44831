use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::EpsPolynomial;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Element of the ordered field `ℝ(ε)`, kept as a reduced rational function
/// `num / den` in the positive infinitesimal `ε`.
///
/// Canonical form: `gcd(num, den) = 1`, the lowest-order coefficient of `den`
/// is 1, and zero is `0 / 1`. Two values are equal iff their canonical
/// representations are identical, so derived equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NonstdNumber {
    num: EpsPolynomial,
    den: EpsPolynomial,
}

/// `ord` of a value: lowest exponent of `ε` in its expansion at `ε → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EpsOrder {
    Finite(i64),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Magnitude {
    Zero,
    Infinitesimal,
    Appreciable,
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl NonstdNumber {
    /// `num / den` in canonical form.
    pub fn new(num: EpsPolynomial, den: EpsPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: EpsPolynomial, den: EpsPolynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let low = den.lowest_coeff().expect("nonzero denominator").clone();
        if low.is_one() {
            Self { num, den }
        } else {
            let inv = low.recip();
            Self { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self { num: EpsPolynomial::constant(r), den: EpsPolynomial::one() }
    }

    pub fn from_poly(p: EpsPolynomial) -> Self {
        Self { num: p, den: EpsPolynomial::one() }
    }

    /// The infinitesimal `ε`.
    pub fn eps() -> Self {
        Self::eps_pow(1)
    }

    /// `ε^k`
    pub fn eps_pow(k: usize) -> Self {
        Self::from_poly(EpsPolynomial::monomial(k, Rational::one()))
    }

    pub fn num(&self) -> &EpsPolynomial {
        &self.num
    }

    pub fn den(&self) -> &EpsPolynomial {
        &self.den
    }

    pub fn is_standard(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0
    }

    /// The rational value if this number is standard.
    pub fn as_rational(&self) -> Option<Rational> {
        if !self.is_standard() {
            return None;
        }
        Some(self.num.coeffs().first().cloned().unwrap_or_else(Rational::zero))
    }

    /// Leading term of the expansion at `ε → 0⁺`: `(ord, coefficient)`.
    /// `None` for zero.
    pub fn leading_term(&self) -> Option<(i64, Rational)> {
        let on = self.num.order()?;
        let od = self.den.order().expect("nonzero denominator");
        let c = self.num.lowest_coeff()? / self.den.lowest_coeff().expect("nonzero denominator");
        Some((on as i64 - od as i64, c))
    }

    pub fn order(&self) -> EpsOrder {
        match self.leading_term() {
            Some((o, _)) => EpsOrder::Finite(o),
            None => EpsOrder::Infinity,
        }
    }

    pub fn classify(&self) -> (EpsOrder, Magnitude) {
        let ord = self.order();
        let class = match ord {
            EpsOrder::Infinity => Magnitude::Zero,
            EpsOrder::Finite(o) if o > 0 => Magnitude::Infinitesimal,
            EpsOrder::Finite(0) => Magnitude::Appreciable,
            EpsOrder::Finite(_) => Magnitude::Unlimited,
        };
        (ord, class)
    }

    pub fn is_limited(&self) -> bool {
        !matches!(self.classify().1, Magnitude::Unlimited)
    }

    pub fn is_infinitesimal_or_zero(&self) -> bool {
        matches!(self.classify().1, Magnitude::Zero | Magnitude::Infinitesimal)
    }

    /// Closest standard rational; fails for unlimited values.
    pub fn standard_part(&self) -> Result<Rational> {
        match self.leading_term() {
            None => Ok(Rational::zero()),
            Some((o, _)) if o > 0 => Ok(Rational::zero()),
            Some((0, c)) => Ok(c),
            Some(_) => Err(Error::Unlimited),
        }
    }

    /// `st(self / other)` from leading terms alone, without forming the quotient.
    pub fn ratio_standard_part(&self, other: &Self) -> Result<Rational> {
        let (od, cd) = other.leading_term().ok_or(Error::DivisionByZero)?;
        match self.leading_term() {
            None => Ok(Rational::zero()),
            Some((on, cn)) => match on.cmp(&od) {
                Ordering::Greater => Ok(Rational::zero()),
                Ordering::Equal => Ok(cn / cd),
                Ordering::Less => Err(Error::Unlimited),
            },
        }
    }

    pub fn signum(&self) -> Ordering {
        match self.num.lowest_coeff() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if other.den.is_one() && self.den.is_one() && other.num.degree() == Some(0) {
            let inv = other.num.coeffs()[0].recip();
            return Ok(Self::from_poly(self.num.scale(&inv)));
        }
        Ok(Self::canonical(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn arith(op: ArithOp, a: &Self, b: &Self) -> Result<Self> {
        Ok(match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a.checked_div(b)?,
        })
    }

    /// Value of the rational function at a concrete positive `ε`, for
    /// sanity checks only.
    pub fn eval_at(&self, eps: &Rational) -> Option<Rational> {
        let d = self.den.eval(eps);
        (!d.is_zero()).then(|| self.num.eval(eps) / d)
    }
}

fn add_impl(a: &NonstdNumber, b: &NonstdNumber) -> NonstdNumber {
    if a.den.is_one() && b.den.is_one() {
        return NonstdNumber::from_poly(a.num.add(&b.num));
    }
    if a.den == b.den {
        return NonstdNumber::canonical(a.num.add(&b.num), a.den.clone());
    }
    NonstdNumber::canonical(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den))
}

fn mul_impl(a: &NonstdNumber, b: &NonstdNumber) -> NonstdNumber {
    if a.den.is_one() && b.den.is_one() {
        return NonstdNumber::from_poly(a.num.mul(&b.num));
    }
    NonstdNumber::canonical(a.num.mul(&b.num), a.den.mul(&b.den))
}

impl Zero for NonstdNumber {
    fn zero() -> Self {
        Self { num: EpsPolynomial::zero(), den: EpsPolynomial::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for NonstdNumber {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl Ord for NonstdNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators have positive lowest coefficient, so the sign of the
        // cross difference decides.
        let diff = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        match diff.lowest_coeff() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }
}

impl PartialOrd for NonstdNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for NonstdNumber {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a NonstdNumber> for &'a NonstdNumber {
            type Output = NonstdNumber;
            fn $method(self, rhs: &'a NonstdNumber) -> NonstdNumber {
                $body(self, rhs)
            }
        }
        impl $trait for NonstdNumber {
            type Output = NonstdNumber;
            fn $method(self, rhs: NonstdNumber) -> NonstdNumber {
                $body(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a NonstdNumber> for NonstdNumber {
            type Output = NonstdNumber;
            fn $method(self, rhs: &'a NonstdNumber) -> NonstdNumber {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, |a: &NonstdNumber, b: &NonstdNumber| add_impl(a, &-b));
forward_binop!(Mul, mul, mul_impl);
// Panics on a zero divisor; use `checked_div` where zero is possible.
forward_binop!(Div, div, |a: &NonstdNumber, b: &NonstdNumber| a
    .checked_div(b)
    .expect("NonstdNumber division by zero"));

impl Neg for &NonstdNumber {
    type Output = NonstdNumber;
    fn neg(self) -> NonstdNumber {
        NonstdNumber { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for NonstdNumber {
    type Output = NonstdNumber;
    fn neg(self) -> NonstdNumber {
        -&self
    }
}

impl fmt::Display for NonstdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let wrap = |p: &EpsPolynomial| {
                if p.terms().count() > 1 {
                    format!("({p})")
                } else {
                    p.to_string()
                }
            };
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl fmt::Debug for NonstdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
