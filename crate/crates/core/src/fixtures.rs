//! Named worked examples with their expected verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::countable::{
    exhaustive_axiom_check, fincof_cond, nu1_cond, nu4_bet_expectation, sampled_axiom_check, CpsFamily,
    FinCofEvent,
};
use crate::error::Result;
use crate::exec::Exec;
use crate::field::{format_rational, int, rat, NonstdNumber, Rational};
use crate::independence::{approx_indep_set, indep_events, weak_indep, IndepMode, IndepModel};
use crate::lps::Lps;
use crate::measure::{NonstdMeasure, StdMeasure};
use crate::nps::{nps_aeq, nps_simeq};
use crate::popper::{popper_to_slps, Level, PopperSpace};
use crate::space::{Event, RandomVariable, SpaceAlgebra};

pub const NAMES: [&str; 5] = ["mcgee", "approximatelyindep", "needapproximate", "nopopper", "counters"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureCheck {
    pub label: String,
    pub value: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureReport {
    pub name: String,
    pub checks: Vec<FixtureCheck>,
}

impl FixtureReport {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, value: impl Into<String>, pass: bool) {
        self.checks.push(FixtureCheck { label: label.into(), value: value.into(), pass });
    }

    /// Records a boolean against its expected value.
    fn expect_bool(&mut self, label: impl Into<String>, got: bool, want: bool) {
        self.check(label, got.to_string(), got == want);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.label, c.value)?;
            if !c.pass {
                write!(f, "  [FAIL]")?;
            }
            writeln!(f)?;
        }
        let ok = self.checks.iter().filter(|c| c.pass).count();
        write!(f, "{}: {} ({}/{})", self.name, if self.passed() { "pass" } else { "fail" }, ok, self.checks.len())
    }
}

pub fn run(name: &str) -> Option<Result<FixtureReport>> {
    Some(match name {
        "mcgee" => run_mcgee(),
        "approximatelyindep" => run_approximately_indep(),
        "needapproximate" => run_need_approximate(),
        "nopopper" => run_no_popper(),
        "counters" => run_counters(),
        _ => return None,
    })
}

fn c(r: Rational) -> NonstdNumber {
    NonstdNumber::from_rational(r)
}

/// `ν₁ = (1/2 + ε, 1/2 − ε)` and `ν₂ = (1/2, 1/2)`.
pub fn mcgee() -> (NonstdMeasure, NonstdMeasure) {
    let alg = Arc::new(SpaceAlgebra::numbered(2));
    let e = NonstdNumber::eps();
    let half = c(rat(1, 2));
    let nu1 = NonstdMeasure::new(alg.clone(), vec![&half + &e, &half - &e]);
    let nu2 = NonstdMeasure::new(alg, vec![half.clone(), half]);
    (nu1, nu2)
}

/// `ν_i = (1 − 2ε + ε_i, ε − ε_i, ε − ε_i, ε_i)` with `ε₁ = ε²`, `ε₂ = ε³`.
pub fn approximately_indep() -> (NonstdMeasure, NonstdMeasure) {
    let alg = Arc::new(SpaceAlgebra::numbered(4));
    let make = |ei: NonstdNumber| {
        let e = NonstdNumber::eps();
        let top = &(&NonstdNumber::one() - &(&e * &c(int(2)))) + &ei;
        NonstdMeasure::new(alg.clone(), vec![top, &e - &ei, &e - &ei, ei])
    };
    (make(NonstdNumber::eps_pow(2)), make(NonstdNumber::eps_pow(3)))
}

/// The measure on `{1,2,3} × {1,2}` with its two coordinate projections.
pub fn need_approximate() -> (NonstdMeasure, RandomVariable, RandomVariable) {
    let worlds = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)];
    let alg = Arc::new(SpaceAlgebra::discrete(worlds.iter().map(|(a, b)| format!("({a},{b})"))));
    let e = NonstdNumber::eps();
    let e2 = NonstdNumber::eps_pow(2);
    let top = &(&NonstdNumber::one() - &(&e * &c(int(3)))) - &(&e2 * &c(int(3)));
    let nu = NonstdMeasure::new(alg, vec![top, e.clone(), e.clone(), e2.clone(), e, &e2 * &c(int(2))]);
    let x = RandomVariable::new(worlds.iter().map(|w| int(w.0)).collect());
    let y = RandomVariable::new(worlds.iter().map(|w| int(w.1)).collect());
    (nu, x, y)
}

/// Conditioning on every two-element set, with no common prior. The two
/// pairs the closed form leaves open are split evenly.
pub fn no_popper() -> PopperSpace {
    let alg = Arc::new(SpaceAlgebra::numbered(4));
    let mut table = BTreeMap::new();
    let pairs = [(0, 2, rat(1, 3)), (3, 1, rat(1, 3)), (0, 1, rat(1, 2)), (3, 2, rat(1, 2)), (0, 3, rat(1, 2)), (1, 2, rat(1, 2))];
    for (a, b, p) in pairs {
        let mut masses = vec![Rational::zero(); 4];
        masses[b] = Rational::one() - &p;
        masses[a] = p;
        table.insert(Event::from_indices([a, b]), StdMeasure::new(alg.clone(), masses));
    }
    PopperSpace::new(alg, table).expect("fixture events are in range")
}

/// A single measure `μ*` with `μ*(·|V) = μ(·|V)` whenever `μ*(V) > 0`.
pub fn common_prior(space: &PopperSpace) -> Option<StdMeasure> {
    let n = space.n_atoms();
    Event::all(n).filter(|s| !s.is_empty()).find_map(|s| prior_on_support(space, s))
}

fn prior_on_support(space: &PopperSpace, s: Event) -> Option<StdMeasure> {
    let n = space.n_atoms();
    // Ratio constraints `w_a / w_b = r` between atoms of `S`.
    let mut edges: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (&v, m) in space.table() {
        let inside = v.intersect(s);
        if inside.is_empty() {
            continue;
        }
        if v.minus(s).iter().any(|a| !m.mass(a).is_zero()) || inside.iter().any(|a| m.mass(a).is_zero()) {
            return None;
        }
        let idx = inside.indices();
        for w in idx.windows(2) {
            let r = m.mass(w[1]) / m.mass(w[0]);
            edges[w[0]].push((w[1], r.clone()));
            edges[w[1]].push((w[0], r.recip()));
        }
    }
    let mut weight: Vec<Option<Rational>> = vec![None; n];
    for start in s.iter() {
        if weight[start].is_some() {
            continue;
        }
        weight[start] = Some(Rational::one());
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            let wa = weight[a].clone().expect("visited");
            for (b, r) in &edges[a] {
                let wb = &wa * r;
                match &weight[*b] {
                    Some(existing) if *existing != wb => return None,
                    Some(_) => {}
                    None => {
                        weight[*b] = Some(wb);
                        stack.push(*b);
                    }
                }
            }
        }
    }
    let total: Rational = weight.iter().flatten().sum();
    let masses = weight.into_iter().map(|w| w.map_or_else(Rational::zero, |w| w / &total)).collect();
    Some(StdMeasure::new(space.algebra().clone(), masses))
}

fn run_mcgee() -> Result<FixtureReport> {
    let mut r = FixtureReport::new("mcgee");
    let (nu1, nu2) = mcgee();
    r.expect_bool("simeq(ν₁, ν₂)", nps_simeq(&nu1, &nu2)?, true);
    let (cert, _, _) = nps_aeq(&nu1, &nu2)?;
    r.expect_bool("aeq(ν₁, ν₂)", cert.is_equivalent(), false);
    match &cert.witness {
        Some((x, y)) => {
            let sep = nu1.expect(x)?.cmp(&nu1.expect(y)?) != nu2.expect(x)?.cmp(&nu2.expect(y)?);
            r.check("aeq witness", format!("{:?} vs {:?}", x.values(), y.values()), sep);
        }
        None => r.check("aeq witness", "missing", false),
    }
    let chi1 = RandomVariable::indicator(Event::singleton(0), 2);
    let chi2 = RandomVariable::indicator(Event::singleton(1), 2);
    let diff = nu1.expect(&chi1.combine(&int(1), &chi2, &int(-1))?)?;
    let two_eps = &NonstdNumber::eps() * &c(int(2));
    r.check("E_ν₁[χ_w1 − χ_w2]", diff.to_string(), diff == two_eps);
    for alpha in [int(2), rat(3, 2), rat(101, 100)] {
        let v = nu1.expect(&chi1.combine(&int(1), &chi2, &-alpha.clone())?)?;
        r.check(format!("E_ν₁[χ_w1 − {}·χ_w2] < 0", format_rational(&alpha)), v.to_string(), v < NonstdNumber::zero());
    }
    let alg = nu1.algebra().clone();
    let lps = Lps::from_rows(alg, vec![vec![rat(1, 2), rat(1, 2)], vec![int(1), int(0)]])?;
    let (cert, d1, _) = nps_aeq(&nu1, &crate::nps::lps_to_nps(&lps))?;
    r.expect_bool("ν₁ ≈ (uniform, δ_w1)", cert.is_equivalent(), true);
    r.check("decomposition of ν₁", format!("{} measures", d1.lps.len()), d1.lps.len() == 2);
    Ok(r)
}

fn run_approximately_indep() -> Result<FixtureReport> {
    let mut r = FixtureReport::new("approximatelyindep");
    let (nu1, nu2) = approximately_indep();
    let u = Event::from_indices([1, 3]);
    let v = Event::from_indices([2, 3]);
    let vp = Event::singleton(3);
    let w = Event::full(4);
    let q = |nu: &NonstdMeasure, a, b, mode| indep_events(IndepModel::Nps(nu), a, b, w, mode);
    r.expect_bool("exact(U ⟂ V) under ν₁", q(&nu1, u, v, IndepMode::Exact)?, true);
    r.expect_bool("exact(U ⟂ V) under ν₂", q(&nu2, u, v, IndepMode::Exact)?, false);
    r.expect_bool("aeq(ν₁, ν₂)", nps_aeq(&nu1, &nu2)?.0.is_equivalent(), true);
    r.expect_bool("approx(U ⟂ V′) under ν₁", q(&nu1, u, vp, IndepMode::Approx)?, true);
    r.expect_bool("approx(V′ ⟂ U) under ν₁", q(&nu1, vp, u, IndepMode::Approx)?, false);
    let not_vp = vp.complement(4);
    r.expect_bool("approx(¬V′ ⟂ U) under ν₁", q(&nu1, not_vp, u, IndepMode::Approx)?, true);
    Ok(r)
}

fn run_need_approximate() -> Result<FixtureReport> {
    let mut r = FixtureReport::new("needapproximate");
    let (nu, x, y) = need_approximate();
    r.expect_bool("weak_indep", weak_indep(&nu, &x, &y, true)?, true);
    match approx_indep_set(&nu, &y, std::slice::from_ref(&x))? {
        Some(f) => {
            let ok = f.lhs == rat(1, 3) && f.rhs == rat(1, 2);
            r.check(
                "approx_indep_set(Y;[X])",
                format!("false ({} vs {})", format_rational(&f.lhs), format_rational(&f.rhs)),
                ok,
            );
        }
        None => r.check("approx_indep_set(Y;[X])", "true", false),
    }
    Ok(r)
}

fn run_no_popper() -> Result<FixtureReport> {
    let mut r = FixtureReport::new("nopopper");
    let p = no_popper();
    r.expect_bool("cps", p.validate(Level::Cps).is_valid(), true);
    let popper = p.validate(Level::Popper);
    r.expect_bool("popper", popper.is_valid(), false);
    r.expect_bool("superset closure violated", popper.has("superset closure"), true);
    let prior = common_prior(&p);
    r.check("common prior", prior.as_ref().map_or("none".into(), |m| format!("{:?}", m.masses())), prior.is_none());
    r.expect_bool("popper_to_slps succeeds", popper_to_slps(&p).is_ok(), false);
    Ok(r)
}

fn fin(xs: &[u64]) -> FinCofEvent {
    FinCofEvent::finite(xs.iter().copied())
}

fn run_counters() -> Result<FixtureReport> {
    let mut r = FixtureReport::new("counters");
    for fam in [CpsFamily::Mu1, CpsFamily::Mu2] {
        let rep = exhaustive_axiom_check(fam, 8, Exec::default());
        r.check(format!("{fam:?} CP1–CP3 on supports ⊆ {{0..7}}"), rep.issues.len().to_string() + " issues", rep.is_valid());
    }
    let halves = (1..=20).all(|n| fincof_cond(CpsFamily::Mu1, &fin(&[0]), &fin(&[0, n])).is_ok_and(|v| v == rat(1, 2)));
    r.expect_bool("μ¹({0}|{0,n}) = 1/2 for n ≤ 20", halves, true);
    r.expect_bool(
        "μ²({1,3}|{1,2,3}) = 1",
        fincof_cond(CpsFamily::Mu2, &fin(&[1, 3]), &fin(&[1, 2, 3]))?.is_one(),
        true,
    );
    r.check("st(ν¹({1}|{1,2,3}))", format_rational(&nu1_cond(&fin(&[1]), &fin(&[1, 2, 3]))?.standard_part()?), true);
    let sample = [(fin(&[0]), fin(&[0, 1]), fin(&[0, 1, 2]))];
    r.expect_bool("μ¹ CP3 on {0} ⊆ {0,1} ⊆ {0,1,2}", sampled_axiom_check(CpsFamily::Mu1, &sample).is_valid(), true);
    for k in 1..=6u32 {
        let got = nu4_bet_expectation(k);
        let want = &NonstdNumber::eps() * &c(int((1i64 << k) + 1));
        r.check(format!("ν⁴ bet at k={k}"), got.to_string(), got == want);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_passes() {
        for name in NAMES {
            let rep = run(name).unwrap().unwrap();
            assert!(rep.passed(), "{rep}");
        }
        assert!(run("nope").is_none());
    }

    #[test]
    fn prior_found_when_consistent() {
        let alg = Arc::new(SpaceAlgebra::numbered(3));
        let l = Lps::from_rows(alg, vec![vec![rat(1, 2), rat(1, 2), int(0)], vec![int(0), int(0), int(1)]]).unwrap();
        let p = crate::popper::slps_to_popper(&l).unwrap();
        assert_eq!(common_prior(&p).unwrap(), l.measures()[0]);
    }
}
