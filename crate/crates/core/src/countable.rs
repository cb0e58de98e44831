//! Finite and cofinite subsets of ℕ, with the closed-form conditional
//! probabilities and nonstandard measures that live on them.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{EpsPolynomial, NonstdNumber, Rational};
use crate::measure::ValidationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinCofMode {
    Finite,
    Cofinite,
}

/// A finite set, or the complement of one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinCofEvent {
    pub mode: FinCofMode,
    pub support: BTreeSet<u64>,
}

impl FinCofEvent {
    pub fn finite(items: impl IntoIterator<Item = u64>) -> Self {
        Self { mode: FinCofMode::Finite, support: items.into_iter().collect() }
    }

    /// `ℕ ∖ items`
    pub fn cofinite(items: impl IntoIterator<Item = u64>) -> Self {
        Self { mode: FinCofMode::Cofinite, support: items.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::finite([])
    }

    pub fn naturals() -> Self {
        Self::cofinite([])
    }

    pub fn is_finite(&self) -> bool {
        self.mode == FinCofMode::Finite
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.support.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.support.contains(&k) == self.is_finite()
    }

    /// Cardinality of a finite event.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then(|| self.support.len())
    }

    pub fn max(&self) -> Option<u64> {
        if self.is_finite() {
            self.support.last().copied()
        } else {
            None
        }
    }

    pub fn complement(&self) -> Self {
        let mode = match self.mode {
            FinCofMode::Finite => FinCofMode::Cofinite,
            FinCofMode::Cofinite => FinCofMode::Finite,
        };
        Self { mode, support: self.support.clone() }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        use FinCofMode::*;
        match (self.mode, other.mode) {
            (Finite, Finite) => Self::finite(self.support.intersection(&other.support).copied()),
            (Finite, Cofinite) => Self::finite(self.support.difference(&other.support).copied()),
            (Cofinite, Finite) => Self::finite(other.support.difference(&self.support).copied()),
            (Cofinite, Cofinite) => Self::cofinite(self.support.union(&other.support).copied()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.complement().intersect(&other.complement()).complement()
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.minus(other).is_empty()
    }
}

impl fmt::Display for FinCofEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.support.iter().map(u64::to_string).collect();
        match self.mode {
            FinCofMode::Finite => write!(f, "{{{}}}", items.join(",")),
            FinCofMode::Cofinite if items.is_empty() => write!(f, "ℕ"),
            FinCofMode::Cofinite => write!(f, "ℕ∖{{{}}}", items.join(",")),
        }
    }
}

/// Operations the closed forms need from a finite-or-cofinite set.
pub trait FinCofSet: Clone + fmt::Display {
    fn is_finite(&self) -> bool;
    /// Size of the set (finite) or of its complement (cofinite).
    fn support_len(&self) -> usize;
    fn intersect(&self, other: &Self) -> Self;
    fn complement(&self) -> Self;

    fn is_empty(&self) -> bool {
        self.is_finite() && self.support_len() == 0
    }

    /// Largest element of a finite set.
    fn max(&self) -> Option<u64>;

    fn minus(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.minus(other).is_empty()
    }
}

impl FinCofSet for FinCofEvent {
    fn is_finite(&self) -> bool {
        FinCofEvent::is_finite(self)
    }
    fn support_len(&self) -> usize {
        self.support.len()
    }
    fn intersect(&self, other: &Self) -> Self {
        FinCofEvent::intersect(self, other)
    }
    fn complement(&self) -> Self {
        FinCofEvent::complement(self)
    }
    fn max(&self) -> Option<u64> {
        FinCofEvent::max(self)
    }
}

/// Bitmask form for supports inside `{0, …, 63}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FinCofBits {
    pub cofinite: bool,
    pub bits: u64,
}

impl FinCofBits {
    pub fn to_event(self) -> FinCofEvent {
        let items = (0..64).filter(|k| self.bits >> k & 1 == 1);
        if self.cofinite {
            FinCofEvent::cofinite(items)
        } else {
            FinCofEvent::finite(items)
        }
    }
}

impl fmt::Display for FinCofBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_event().fmt(f)
    }
}

impl FinCofSet for FinCofBits {
    fn is_finite(&self) -> bool {
        !self.cofinite
    }
    fn support_len(&self) -> usize {
        self.bits.count_ones() as usize
    }
    fn intersect(&self, o: &Self) -> Self {
        let (cofinite, bits) = match (self.cofinite, o.cofinite) {
            (false, false) => (false, self.bits & o.bits),
            (false, true) => (false, self.bits & !o.bits),
            (true, false) => (false, o.bits & !self.bits),
            (true, true) => (true, self.bits | o.bits),
        };
        Self { cofinite, bits }
    }
    fn complement(&self) -> Self {
        Self { cofinite: !self.cofinite, bits: self.bits }
    }
    fn max(&self) -> Option<u64> {
        (!self.cofinite && self.bits != 0).then(|| 63 - self.bits.leading_zeros() as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CpsFamily {
    /// Uniform on finite conditioning sets.
    Mu1,
    /// Larger numbers infinitely more likely.
    Mu2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NpsFamily {
    /// `|U|ε` on finite sets.
    Nu1,
    /// `2^{-j} + b_j ε` on `w_j`.
    Nu4,
}

/// `μ(V|U)`. For cofinite `U` the value is 1 or 0 according to whether `V`
/// itself is cofinite.
pub fn fincof_cond<S: FinCofSet>(family: CpsFamily, v: &S, u: &S) -> Result<Rational> {
    if u.is_empty() {
        return Err(Error::EmptyConditioningEvent);
    }
    if !u.is_finite() {
        return Ok(if v.is_finite() { Rational::zero() } else { Rational::one() });
    }
    let vu = v.intersect(u);
    Ok(match family {
        CpsFamily::Mu1 => Rational::new(BigInt::from(vu.support_len()), BigInt::from(u.support_len())),
        CpsFamily::Mu2 => {
            if vu.max() == u.max() {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    })
}

fn pow2_inv(j: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << j)
}

/// `(a_j, b_j)` for `w_j`, `j ≥ 1`.
pub fn nu4_coefficients(j: u64) -> (Rational, Rational) {
    assert!(j >= 1);
    let b = pow2_inv(j.div_ceil(2) - 1);
    (pow2_inv(j), if j % 2 == 1 { b } else { -b })
}

fn linear(a: Rational, b: Rational) -> NonstdNumber {
    NonstdNumber::from_poly(EpsPolynomial::from_dense(vec![a, b]))
}

/// `ν¹(U)`
pub fn nu1_value<S: FinCofSet>(u: &S) -> NonstdNumber {
    let k = Rational::from_integer(BigInt::from(u.support_len()));
    if u.is_finite() {
        linear(Rational::zero(), k)
    } else {
        linear(Rational::one(), -k)
    }
}

/// `ν(U)`. For `Nu4` the natural `k` stands for the world `w_{k+1}`.
pub fn fincof_nps_value(family: NpsFamily, u: &FinCofEvent) -> NonstdNumber {
    match family {
        NpsFamily::Nu1 => nu1_value(u),
        NpsFamily::Nu4 => {
            let (a, b) = u.support.iter().fold((Rational::zero(), Rational::zero()), |(a, b), &k| {
                let (aj, bj) = nu4_coefficients(k + 1);
                (a + aj, b + bj)
            });
            match u.mode {
                FinCofMode::Finite => linear(a, b),
                // Total a-mass is 1 and total b-mass is 0.
                FinCofMode::Cofinite => linear(Rational::one() - a, -b),
            }
        }
    }
}

/// Expectation of `χ_{w_1} − 2^{2k−1} χ_{w_{2k}}` under `Nu4`.
pub fn nu4_bet_expectation(k: u32) -> NonstdNumber {
    assert!(k >= 1);
    let w1 = fincof_nps_value(NpsFamily::Nu4, &FinCofEvent::finite([0]));
    let w2k = fincof_nps_value(NpsFamily::Nu4, &FinCofEvent::finite([2 * k as u64 - 1]));
    let stake = NonstdNumber::from_rational(Rational::from_integer(BigInt::one() << (2 * k - 1)));
    &w1 - &(&stake * &w2k)
}

/// `ν¹(V|U)`
pub fn nu1_cond<S: FinCofSet>(v: &S, u: &S) -> Result<NonstdNumber> {
    if u.is_empty() {
        return Err(Error::EmptyConditioningEvent);
    }
    nu1_value(&v.intersect(u)).checked_div(&nu1_value(u))
}

/// Checks CP1, CP2 and (for chains `V ⊆ X ⊆ U`) CP3 on each triple, and for
/// `Mu1` the correspondence `st(ν¹(V|U)) = μ¹(V|U)`.
pub fn sampled_axiom_check(family: CpsFamily, triples: &[(FinCofEvent, FinCofEvent, FinCofEvent)]) -> ValidationReport {
    sampled_axiom_check_with(family, triples, Exec::default())
}

pub fn sampled_axiom_check_with(
    family: CpsFamily,
    triples: &[(FinCofEvent, FinCofEvent, FinCofEvent)],
    exec: Exec,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    for issues in exec.map(triples, |(v, x, u)| check_triple(family, v, x, u)) {
        report.extend(issues);
    }
    report
}

fn check_triple<S: FinCofSet>(family: CpsFamily, v: &S, x: &S, u: &S) -> ValidationReport {
    let mut r = ValidationReport::default();
    let loc = || format!("V={v}, X={x}, U={u}");
    let mu = |a: &S, b: &S| fincof_cond(family, a, b);
    if u.is_empty() {
        r.push("empty conditioning event", loc(), "U is empty");
        return r;
    }
    for c in [u, x].into_iter().filter(|c| !c.is_empty()) {
        match mu(c, c) {
            Ok(m) if m.is_one() => {}
            other => r.push("CP1", loc(), format!("μ({c}|{c}) = {other:?}")),
        }
    }
    let (Ok(vu), Ok(xu), Ok(rest)) = (mu(v, u), mu(x, u), mu(&x.minus(v), u)) else {
        r.push("CP2", loc(), "conditional undefined");
        return r;
    };
    for m in [&vu, &xu] {
        if *m < Rational::zero() || *m > Rational::one() {
            r.push("range", loc(), format!("{m} outside [0,1]"));
        }
    }
    if v.is_subset(x) && vu.clone() + rest != xu {
        r.push("CP2", loc(), "μ(V|U) + μ(X∖V|U) ≠ μ(X|U)");
    }
    match mu(&v.complement(), u) {
        Ok(c) if &c + &vu == Rational::one() => {}
        _ => r.push("CP2", loc(), "μ(V|U) + μ(ℕ∖V|U) ≠ 1"),
    }
    if v.is_subset(x) && x.is_subset(u) && !x.is_empty() {
        match mu(v, x) {
            Ok(vx) if &vx * &xu == vu => {}
            other => r.push("CP3", loc(), format!("μ(V|X) = {other:?}, μ(X|U) = {xu}, μ(V|U) = {vu}")),
        }
    }
    if family == CpsFamily::Mu1 {
        let ratio = nu1_value(&v.intersect(u)).ratio_standard_part(&nu1_value(u));
        match ratio {
            Ok(s) if s == vu => {}
            other => r.push("correspondence", loc(), format!("st(ν¹(V|U)) = {other:?}, μ¹(V|U) = {vu}")),
        }
    }
    r
}

/// Every chain `V ⊆ X ⊆ U` of finite or cofinite sets whose supports lie in
/// `{0, …, bound − 1}`, in a fixed order.
pub fn exhaustive_chains(bound: u32) -> impl Iterator<Item = (FinCofBits, FinCofBits, FinCofBits)> {
    (0..chain_count(bound)).map(move |i| chain_at(i, bound))
}

pub fn chain_count(bound: u32) -> u64 {
    assert!(bound <= 31);
    4 * 4u64.pow(bound)
}

/// Each element gets a depth: 0 outside U, 1 in U only, 2 in X, 3 in V.
/// Cofiniteness is monotone along the chain, so four mode patterns remain.
pub fn chain_at(idx: u64, bound: u32) -> (FinCofBits, FinCofBits, FinCofBits) {
    let per_mode = 4u64.pow(bound);
    let (pattern, mut code) = (idx / per_mode, idx % per_mode);
    let mut sets = [0u64; 3];
    for k in 0..bound {
        let depth = (code % 4) as usize;
        code /= 4;
        // sets[0] = V, sets[1] = X, sets[2] = U
        for (i, set) in sets.iter_mut().enumerate() {
            if depth >= 3 - i {
                *set |= 1 << k;
            }
        }
    }
    let universe = (1u64 << bound) - 1;
    let make = |i: usize| {
        // pattern p makes the last p sets of (V, X, U) cofinite
        if i as u64 + pattern >= 3 {
            FinCofBits { cofinite: true, bits: universe & !sets[i] }
        } else {
            FinCofBits { cofinite: false, bits: sets[i] }
        }
    };
    (make(0), make(1), make(2))
}

/// CP1–CP3 over `exhaustive_chains(bound)`, skipping empty `U`.
pub fn exhaustive_axiom_check(family: CpsFamily, bound: u32, exec: Exec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let parts = exec.map_range(chain_count(bound), |i| {
        let (v, x, u) = chain_at(i, bound);
        if u.is_empty() {
            ValidationReport::default()
        } else {
            check_triple(family, &v, &x, &u)
        }
    });
    for p in parts {
        report.extend(p);
    }
    report
}
