use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::Rational;
use crate::linalg::{self, Matrix, SpanBuilder};
use crate::measure::{same_algebra, StdMeasure, ValidationReport};
use crate::space::{Event, RandomVariable, SpaceAlgebra};

/// Lexicographic probability system of finite length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lps {
    algebra: Arc<SpaceAlgebra>,
    measures: Vec<StdMeasure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpsClassification {
    pub is_slps: bool,
    pub is_mslps: bool,
    pub is_lcps: bool,
    /// Supports of the measures, reported when `is_slps` holds.
    pub support_witnesses: Vec<Event>,
}

impl Lps {
    pub fn new(measures: Vec<StdMeasure>) -> Result<Self> {
        let first = measures.first().ok_or_else(|| Error::InvalidSpace("an LPS needs at least one measure".into()))?;
        let algebra = first.algebra().clone();
        if measures.iter().any(|m| !same_algebra(m.algebra(), &algebra)) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self { algebra, measures })
    }

    /// Builds from raw mass rows on one algebra, without validating masses.
    pub fn from_rows(algebra: Arc<SpaceAlgebra>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(rows.into_iter().map(|r| StdMeasure::new(algebra.clone(), r)).collect())
    }

    pub fn algebra(&self) -> &Arc<SpaceAlgebra> {
        &self.algebra
    }

    pub fn measures(&self) -> &[StdMeasure] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn n_atoms(&self) -> usize {
        self.algebra.n_atoms()
    }

    pub fn rows(&self) -> Matrix {
        self.measures.iter().map(|m| m.masses().to_vec()).collect()
    }

    pub fn check_same_algebra(&self, other: &Lps) -> Result<()> {
        if same_algebra(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn validate(&self) -> ValidationReport {
        crate::measure::validate_space(&self.algebra, &self.measures)
    }

    /// `μ⃗(U)`
    pub fn measure_vector(&self, u: Event) -> Vec<Rational> {
        self.measures.iter().map(|m| m.measure_event(u)).collect()
    }

    /// Least index giving `U` positive probability; `μ⃗(U) > 0⃗` iff this exists.
    pub fn first_positive(&self, u: Event) -> Option<usize> {
        self.measures.iter().position(|m| m.measure_event(u).is_positive())
    }

    pub fn condition(&self, u: Event) -> Result<Lps> {
        let measures = self
            .measures
            .iter()
            .filter(|m| m.measure_event(u).is_positive())
            .map(|m| m.condition(u))
            .collect::<Result<Vec<_>>>()?;
        if measures.is_empty() {
            return Err(Error::ZeroConditioningEvent);
        }
        Ok(Lps { algebra: self.algebra.clone(), measures })
    }

    /// `(E_{μ_i}(X))_i`
    pub fn expectations(&self, x: &RandomVariable) -> Result<Vec<Rational>> {
        self.measures.iter().map(|m| m.expect(x)).collect()
    }

    pub fn expect_cmp(&self, x: &RandomVariable, y: &RandomVariable) -> Result<Ordering> {
        Ok(self.expectations(x)?.cmp(&self.expectations(y)?))
    }

    pub fn classify(&self) -> LpsClassification {
        let supports: Vec<Event> = self.measures.iter().map(StdMeasure::support).collect();
        let null_on = |b: usize, g: usize| self.measures[b].measure_event(supports[g]).is_zero();
        let k = self.len();
        let is_slps = (0..k).all(|b| (b + 1..k).all(|g| null_on(b, g)));
        let is_mslps = (0..k).all(|b| (0..k).all(|g| g == b || null_on(b, g)));
        let is_lcps = (0..k).all(|b| (b + 1..k).all(|g| supports[b].is_disjoint(supports[g])));
        LpsClassification {
            is_slps,
            is_mslps,
            is_lcps,
            support_witnesses: if is_slps { supports } else { Vec::new() },
        }
    }

    /// Drops every measure in the rational span of the measures kept before it.
    pub fn reduce(&self) -> Lps {
        let mut span = SpanBuilder::new();
        let measures =
            self.measures.iter().filter(|m| span.insert(m.masses())).cloned().collect();
        Lps { algebra: self.algebra.clone(), measures }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equivalent,
    Inequivalent,
}

/// Evidence for an `≈` verdict.
///
/// Equivalent: `forward · reduced_a = reduced_b` and
/// `backward · reduced_b = reduced_a`, both lower triangular with positive
/// diagonal. Inequivalent: `witness = (X, Y)` ordered differently by `a`
/// and `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivCertificate {
    pub verdict: Verdict,
    pub reduced_a: Matrix,
    pub reduced_b: Matrix,
    pub forward: Option<Matrix>,
    pub backward: Option<Matrix>,
    pub witness: Option<(RandomVariable, RandomVariable)>,
}

impl EquivCertificate {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }

    /// Re-checks the certificate against the original inputs.
    pub fn verify(&self, a: &Lps, b: &Lps) -> bool {
        match self.verdict {
            Verdict::Equivalent => {
                let (Some(t), Some(s)) = (&self.forward, &self.backward) else {
                    return false;
                };
                a.reduce().rows() == self.reduced_a
                    && b.reduce().rows() == self.reduced_b
                    && is_lower_positive(t)
                    && is_lower_positive(s)
                    && t.len() == self.reduced_b.len()
                    && s.len() == self.reduced_a.len()
                    && linalg::mat_mul(t, &self.reduced_a) == self.reduced_b
                    && linalg::mat_mul(s, &self.reduced_b) == self.reduced_a
            }
            Verdict::Inequivalent => {
                let Some((x, y)) = &self.witness else {
                    return false;
                };
                match (a.expect_cmp(x, y), b.expect_cmp(x, y)) {
                    (Ok(ca), Ok(cb)) => ca != cb,
                    _ => false,
                }
            }
        }
    }
}

fn is_lower_positive(t: &Matrix) -> bool {
    t.iter().enumerate().all(|(i, row)| {
        row.len() == t.len()
            && row[i].is_positive()
            && row[i + 1..].iter().all(Zero::is_zero)
    })
}

/// Decides `a ≈ b` and returns a self-checked certificate.
pub fn lps_equiv(a: &Lps, b: &Lps) -> Result<EquivCertificate> {
    a.check_same_algebra(b)?;
    let ra = a.reduce().rows();
    let rb = b.reduce().rows();
    let n = a.n_atoms();
    let cert = match decide(&ra, &rb, n) {
        Decision::Equivalent(t, s) => EquivCertificate {
            verdict: Verdict::Equivalent,
            reduced_a: ra,
            reduced_b: rb,
            forward: Some(t),
            backward: Some(s),
            witness: None,
        },
        Decision::Separating(z) => {
            let z = orient(integer_direction(z), a, b)?;
            let x = RandomVariable::new(z.iter().map(|v| if v.is_positive() { v.clone() } else { Rational::zero() }).collect());
            let y = RandomVariable::new(z.iter().map(|v| if v.is_negative() { -v } else { Rational::zero() }).collect());
            EquivCertificate {
                verdict: Verdict::Inequivalent,
                reduced_a: ra,
                reduced_b: rb,
                forward: None,
                backward: None,
                witness: Some((x, y)),
            }
        }
    };
    assert!(cert.verify(a, b), "≈ certificate failed its own check");
    Ok(cert)
}

enum Decision {
    Equivalent(Matrix, Matrix),
    Separating(Vec<Rational>),
}

fn decide(ra: &Matrix, rb: &Matrix, n: usize) -> Decision {
    if let Some(z) = separating_null_vector(ra, rb, n) {
        return Decision::Separating(z);
    }
    if let Some(z) = separating_null_vector(rb, ra, n) {
        return Decision::Separating(z);
    }
    // Same row space and both bases independent, so `T` is square and unique.
    let t: Matrix = rb.iter().map(|row| linalg::express_in_rows(ra, row).expect("row in span")).collect();
    match first_bad_row(&t) {
        None => {
            let s: Matrix = ra.iter().map(|row| linalg::express_in_rows(rb, row).expect("row in span")).collect();
            Decision::Equivalent(t, s)
        }
        Some(i) => {
            let k = t.len();
            let mut x = vec![Rational::zero(); k];
            let row = &t[i];
            if let Some(p) = (i + 1..k).find(|&p| row[p].is_negative()) {
                x[p] = Rational::one();
            } else if let Some(p) = (i + 1..k).find(|&p| row[p].is_positive()) {
                let delta = &row[p] / (Rational::from_integer(2.into()) * (row[i].abs() + Rational::one()));
                x[p] = Rational::one();
                x[i] = -delta;
            } else {
                debug_assert!(row[i].is_negative());
                x[i] = Rational::one();
            }
            Decision::Separating(linalg::solve(ra, n, &x).expect("independent rows"))
        }
    }
}

/// A vector killed by every row of `base` but not by some row of `other`.
fn separating_null_vector(base: &Matrix, other: &Matrix, n: usize) -> Option<Vec<Rational>> {
    let mut span = SpanBuilder::new();
    for r in base {
        span.insert(r);
    }
    let row = other.iter().find(|r| !span.contains(r))?;
    linalg::null_space(base, n).into_iter().find(|z| !linalg::dot(row, z).is_zero())
}

fn first_bad_row(t: &Matrix) -> Option<usize> {
    t.iter().enumerate().position(|(i, row)| !row[i].is_positive() || row[i + 1..].iter().any(|v| !v.is_zero()))
}

/// Scales to coprime integers.
fn integer_direction(z: Vec<Rational>) -> Vec<Rational> {
    let l = z.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = z.iter().map(|v| (v * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return z;
    }
    ints.into_iter().map(|v| Rational::from_integer(v / &g)).collect()
}

/// Sign convention: `a` ranks `X` above `Y`, or failing that `b` does.
fn orient(z: Vec<Rational>, a: &Lps, b: &Lps) -> Result<Vec<Rational>> {
    let zv = RandomVariable::new(z.clone());
    let zero = RandomVariable::zero(z.len());
    let sign = match a.expect_cmp(&zv, &zero)? {
        Ordering::Equal => b.expect_cmp(&zv, &zero)?,
        s => s,
    };
    Ok(if sign == Ordering::Less { z.into_iter().map(|v| -v).collect() } else { z })
}
