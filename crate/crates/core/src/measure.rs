use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{NonstdNumber, Rational, Scalar};
use crate::space::{Event, RandomVariable, SpaceAlgebra};

/// Finitely additive probability given by its atom masses.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Measure<T> {
    algebra: Arc<SpaceAlgebra>,
    mass: Vec<T>,
}

pub type StdMeasure = Measure<Rational>;
pub type NonstdMeasure = Measure<NonstdNumber>;

impl<T: Scalar> Measure<T> {
    /// Builds without validation; see [`Measure::validated`].
    pub fn new(algebra: Arc<SpaceAlgebra>, mass: Vec<T>) -> Self {
        Self { algebra, mass }
    }

    pub fn validated(algebra: Arc<SpaceAlgebra>, mass: Vec<T>) -> Result<Self> {
        let m = Self::new(algebra, mass);
        let report = m.validate();
        if report.is_valid() {
            Ok(m)
        } else {
            Err(Error::InvalidSpace(report.to_string()))
        }
    }

    /// Point mass on one atom.
    pub fn dirac(algebra: Arc<SpaceAlgebra>, atom: usize) -> Self {
        let n = algebra.n_atoms();
        let mass = (0..n).map(|a| if a == atom { T::one() } else { T::zero() }).collect();
        Self { algebra, mass }
    }

    pub fn uniform(algebra: Arc<SpaceAlgebra>) -> Self {
        let n = algebra.n_atoms();
        let w = T::from_rational(Rational::new(1.into(), (n as i64).into()));
        Self { algebra, mass: vec![w; n] }
    }

    pub fn algebra(&self) -> &Arc<SpaceAlgebra> {
        &self.algebra
    }

    pub fn masses(&self) -> &[T] {
        &self.mass
    }

    pub fn mass(&self, atom: usize) -> &T {
        &self.mass[atom]
    }

    pub fn n_atoms(&self) -> usize {
        self.mass.len()
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra)
    }

    pub fn check_same_algebra(&self, other: &Self) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for p in self.algebra.problems() {
            r.push("invalid algebra", "algebra", p);
        }
        check_measure(&mut r, "measure", &self.algebra, self);
        r
    }

    /// `m(E)`
    pub fn measure_event(&self, e: Event) -> T {
        e.iter().filter(|&a| a < self.mass.len()).fold(T::zero(), |acc, a| acc.add_ref(&self.mass[a]))
    }

    /// Masses of every event, indexed by bitmask.
    pub fn event_masses(&self) -> Vec<T> {
        let n = self.mass.len();
        let mut out: Vec<T> = Vec::with_capacity(1 << n);
        out.push(T::zero());
        for bits in 1u64..(1u64 << n) {
            let low = bits.trailing_zeros() as usize;
            let v = out[(bits & (bits - 1)) as usize].add_ref(&self.mass[low]);
            out.push(v);
        }
        out
    }

    pub fn expect(&self, x: &RandomVariable) -> Result<T> {
        if x.n_atoms() != self.mass.len() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self
            .mass
            .iter()
            .zip(x.values())
            .filter(|(_, v)| !v.is_zero())
            .fold(T::zero(), |acc, (m, v)| acc.add_ref(&m.mul_rational(v))))
    }

    /// `m(·|U)`
    pub fn condition(&self, u: Event) -> Result<Self> {
        let mu = self.measure_event(u);
        if mu.is_zero() {
            return Err(Error::ZeroConditioningEvent);
        }
        let mass = self
            .mass
            .iter()
            .enumerate()
            .map(|(a, m)| if u.contains(a) { m.checked_div(&mu) } else { Ok(T::zero()) })
            .collect::<Result<Vec<T>>>()?;
        Ok(Self { algebra: self.algebra.clone(), mass })
    }

    /// `m(V|U)`
    pub fn conditional(&self, v: Event, u: Event) -> Result<T> {
        let mu = self.measure_event(u);
        if mu.is_zero() {
            return Err(Error::ZeroConditioningEvent);
        }
        self.measure_event(v.intersect(u)).checked_div(&mu)
    }

    /// Atoms of nonzero mass.
    pub fn support(&self) -> Event {
        Event::from_indices(self.mass.iter().enumerate().filter(|(_, m)| !m.is_zero()).map(|(a, _)| a))
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Measure<U> {
        Measure { algebra: self.algebra.clone(), mass: self.mass.iter().map(f).collect() }
    }
}

impl StdMeasure {
    pub fn to_nonstd(&self) -> NonstdMeasure {
        self.map(|r| NonstdNumber::from_rational(r.clone()))
    }
}

impl NonstdMeasure {
    /// Atomwise standard part.
    pub fn standard_part(&self) -> Result<StdMeasure> {
        let mass = self.mass.iter().map(NonstdNumber::standard_part).collect::<Result<Vec<_>>>()?;
        Ok(Measure { algebra: self.algebra.clone(), mass })
    }

    pub fn is_standard(&self) -> bool {
        self.mass.iter().all(NonstdNumber::is_standard)
    }
}

impl<T: fmt::Debug> fmt::Debug for Measure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.mass).finish()
    }
}

pub fn same_algebra(a: &Arc<SpaceAlgebra>, b: &Arc<SpaceAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub code: String,
    pub location: String,
    pub detail: String,
}

/// List of violations; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, code: &str, location: impl Into<String>, detail: impl Into<String>) {
        self.issues.push(Issue { code: code.to_string(), location: location.into(), detail: detail.into() });
    }

    pub fn has(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} at {}: {}", issue.code, issue.location, issue.detail)?;
        }
        Ok(())
    }
}

fn check_measure<T: Scalar>(r: &mut ValidationReport, loc: &str, alg: &Arc<SpaceAlgebra>, m: &Measure<T>) {
    if !same_algebra(alg, &m.algebra) {
        r.push("algebra mismatch", loc, "measure lives on a different algebra");
    }
    if m.mass.len() != alg.n_atoms() {
        r.push("length mismatch", loc, format!("{} masses for {} atoms", m.mass.len(), alg.n_atoms()));
        return;
    }
    for (a, x) in m.mass.iter().enumerate() {
        if *x < T::zero() {
            r.push("negative mass", format!("{loc} atom {a}"), format!("{x:?}"));
        }
        if !x.is_limited() {
            r.push("unlimited mass", format!("{loc} atom {a}"), format!("{x:?}"));
        }
    }
    let total = m.mass.iter().fold(T::zero(), |acc, x| acc.add_ref(x));
    if !total.is_one() {
        r.push("sum ≠ 1", loc, format!("masses sum to {total:?}"));
    }
}

/// Checks the algebra and every measure on it.
pub fn validate_space<T: Scalar>(algebra: &Arc<SpaceAlgebra>, measures: &[Measure<T>]) -> ValidationReport {
    let mut r = ValidationReport::default();
    for p in algebra.problems() {
        r.push("invalid algebra", "algebra", p);
    }
    for (i, m) in measures.iter().enumerate() {
        check_measure(&mut r, &format!("measure {i}"), algebra, m);
    }
    r
}
