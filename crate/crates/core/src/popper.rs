use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Rational;
use crate::lps::Lps;
use crate::measure::{same_algebra, StdMeasure, ValidationReport};
use crate::space::{Event, SpaceAlgebra};

/// Finite conditional probability space: conditioning family `F′` with one
/// stored conditional measure per member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PopperSpace {
    algebra: Arc<SpaceAlgebra>,
    table: BTreeMap<Event, StdMeasure>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Cps,
    Popper,
    Treelike,
}

/// Forest structure of a treelike `F′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    pub parent: BTreeMap<Event, Option<Event>>,
}

impl TreeShape {
    pub fn roots(&self) -> Vec<Event> {
        self.parent.iter().filter(|(_, p)| p.is_none()).map(|(u, _)| *u).collect()
    }

    pub fn children(&self, u: Event) -> Vec<Event> {
        self.parent.iter().filter(|(_, p)| **p == Some(u)).map(|(c, _)| *c).collect()
    }

    pub fn depth(&self, u: Event) -> usize {
        let mut d = 0;
        let mut cur = u;
        while let Some(Some(p)) = self.parent.get(&cur) {
            d += 1;
            cur = *p;
        }
        d
    }
}

impl PopperSpace {
    pub fn new(algebra: Arc<SpaceAlgebra>, table: BTreeMap<Event, StdMeasure>) -> Result<Self> {
        for (u, m) in &table {
            algebra.check_event(*u)?;
            if !same_algebra(m.algebra(), &algebra) {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(Self { algebra, table })
    }

    pub fn algebra(&self) -> &Arc<SpaceAlgebra> {
        &self.algebra
    }

    pub fn table(&self) -> &BTreeMap<Event, StdMeasure> {
        &self.table
    }

    /// `F′` in lexicographic order.
    pub fn conditioning_events(&self) -> Vec<Event> {
        self.table.keys().copied().collect()
    }

    pub fn contains(&self, u: Event) -> bool {
        self.table.contains_key(&u)
    }

    pub fn n_atoms(&self) -> usize {
        self.algebra.n_atoms()
    }

    /// `μ(V|U)` when `U ∈ F′`.
    pub fn cond(&self, v: Event, u: Event) -> Option<Rational> {
        self.table.get(&u).map(|m| m.measure_event(v))
    }

    pub fn conditional_measure(&self, u: Event) -> Option<&StdMeasure> {
        self.table.get(&u)
    }

    pub fn validate(&self, level: Level) -> ValidationReport {
        validate_popper_with(self, level, Exec::default())
    }

    /// Parent links of `F′` if it is laminar; `None` otherwise.
    pub fn tree_shape(&self) -> Option<TreeShape> {
        let fam = self.conditioning_events();
        let laminar = fam.iter().enumerate().all(|(i, &a)| {
            fam[i + 1..].iter().all(|&b| a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b))
        });
        if !laminar {
            return None;
        }
        let parent = fam
            .iter()
            .map(|&u| {
                let p = fam.iter().filter(|&&s| s != u && u.is_subset(s)).min_by_key(|s| s.len()).copied();
                (u, p)
            })
            .collect();
        Some(TreeShape { parent })
    }
}

pub fn validate_popper(space: &PopperSpace, level: Level) -> ValidationReport {
    validate_popper_with(space, level, Exec::default())
}

pub fn validate_popper_with(space: &PopperSpace, level: Level, exec: Exec) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = space.n_atoms();
    let fam = space.conditioning_events();
    for p in space.algebra.problems() {
        r.push("invalid algebra", "algebra", p);
    }
    for (&u, m) in &space.table {
        let loc = format!("U={u}");
        if u.is_empty() {
            r.push("empty conditioning event", loc.clone(), "∅ ∈ F′");
        }
        if !u.is_subset(Event::full(n)) {
            r.push("event outside algebra", loc.clone(), format!("{u}"));
            continue;
        }
        let mr = m.validate();
        for issue in mr.issues {
            r.push(&issue.code, format!("{loc} {}", issue.location), issue.detail);
        }
        if m.masses().len() == n && !m.measure_event(u).is_one() {
            r.push("CP1", loc, format!("μ(U|U) = {}", m.measure_event(u)));
        }
    }
    if !r.is_valid() {
        return r;
    }

    // CP3 atomwise: with CP2 structural, μ(a|U) = μ(a|X)·μ(X|U) for atoms a ∈ X
    // is equivalent to the identity for every V ⊆ X.
    let cp3 = exec.map(&fam, |&u| {
        let mu = &space.table[&u];
        let mut bad = Vec::new();
        for &x in fam.iter().filter(|&&x| x != u && x.is_subset(u)) {
            let mx = &space.table[&x];
            let xu = mu.measure_event(x);
            for a in x.iter() {
                if *mu.mass(a) != mx.mass(a) * &xu {
                    bad.push((x, a));
                }
            }
        }
        (u, bad)
    });
    for (u, bad) in cp3 {
        for (x, a) in bad {
            r.push("CP3", format!("V={{{a}}} X={x} U={u}"), "μ(V|U) ≠ μ(V|X)·μ(X|U)");
        }
    }

    match level {
        Level::Cps => {}
        Level::Popper => {
            let full = Event::full(n);
            let found = exec.map(&fam, |&u| {
                let mut out = Vec::new();
                for extra in full.minus(u).subsets() {
                    let s = u.union(extra);
                    if !space.contains(s) {
                        out.push(("superset closure", format!("U={u} superset={s}")));
                    }
                }
                let m = &space.table[&u];
                for v in u.subsets().filter(|v| !v.is_empty()) {
                    if m.measure_event(v).is_positive() && !space.contains(v) {
                        out.push(("positive-subset closure", format!("U={u} V={v}")));
                    }
                }
                out
            });
            for (code, loc) in found.into_iter().flatten() {
                r.push(code, loc, "required member of F′ is missing");
            }
        }
        Level::Treelike => check_treelike(space, &mut r),
    }
    r
}

fn check_treelike(space: &PopperSpace, r: &mut ValidationReport) {
    let fam = space.conditioning_events();
    let mut laminar = true;
    for (i, &a) in fam.iter().enumerate() {
        for &b in &fam[i + 1..] {
            if !(a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)) {
                laminar = false;
                r.push("T2", format!("U={a} U'={b}"), "overlapping sets cannot sit in one forest");
            }
        }
    }
    if !laminar {
        return;
    }
    let shape = space.tree_shape().expect("laminar");
    for &u in &fam {
        let kids = shape.children(u);
        if kids.is_empty() {
            continue;
        }
        let union = kids.iter().fold(Event::empty(), |acc, k| acc.union(*k));
        if union != u {
            r.push("T2", format!("U={u}"), format!("children cover {union}, not U"));
        }
    }
    let roots = shape.roots();
    let cover = roots.iter().fold(Event::empty(), |acc, k| acc.union(*k));
    if cover != Event::full(space.n_atoms()) {
        r.push("T3", "roots", format!("roots cover {cover}, not W"));
    }
}

/// `F_{S→P}`: conditioning family `{U : μ⃗(U) > 0⃗}` with least-index
/// conditionals.
pub fn slps_to_popper(slps: &Lps) -> Result<PopperSpace> {
    slps_to_popper_with(slps, Exec::default())
}

pub fn slps_to_popper_with(slps: &Lps, exec: Exec) -> Result<PopperSpace> {
    if !slps.classify().is_slps {
        return Err(Error::NotAnSlps("some measure gives a later support positive probability".into()));
    }
    Ok(lps_conditionals_with(slps, exec))
}

/// Least-index conditioning table of any LPS, without the SLPS check.
pub fn lps_conditionals_with(lps: &Lps, exec: Exec) -> PopperSpace {
    let n = lps.n_atoms();
    let masses: Vec<Vec<Rational>> = lps.measures().iter().map(|m| m.event_masses()).collect();
    let events: Vec<u64> = (1..(1u64 << n)).collect();
    let rows = exec.map(&events, |&bits| {
        let u = Event::from_bits(bits);
        let beta = masses.iter().position(|t| t[bits as usize].is_positive())?;
        let m = lps.measures()[beta].condition(u).expect("positive mass");
        Some((u, m))
    });
    PopperSpace { algebra: lps.algebra().clone(), table: rows.into_iter().flatten().collect() }
}

/// Inverse of `F_{S→P}` on finite Popper spaces; the result is an LCPS.
pub fn popper_to_slps(space: &PopperSpace) -> Result<Lps> {
    let report = space.validate(Level::Popper);
    if !report.is_valid() {
        return Err(Error::InvalidPopperSpace(report.to_string()));
    }
    let n = space.n_atoms();
    let full = Event::full(n);
    let top = space
        .conditional_measure(full)
        .ok_or_else(|| Error::InvalidPopperSpace("W is not a conditioning event".into()))?;
    let mut sets = vec![top.support()];
    let mut covered = sets[0];
    loop {
        let rest = full.minus(covered);
        if rest.is_empty() {
            break;
        }
        let Some(m) = space.conditional_measure(rest) else {
            break;
        };
        let next = m.support();
        sets.push(next);
        covered = covered.union(next);
    }
    let measures = sets
        .iter()
        .map(|u| {
            space
                .conditional_measure(*u)
                .cloned()
                .ok_or_else(|| Error::InvalidPopperSpace(format!("{u} is missing from F′")))
        })
        .collect::<Result<Vec<_>>>()?;
    Lps::new(measures)
}

/// Labels of the inductive construction for treelike cps's.
pub fn treelike_labels(space: &PopperSpace, shape: &TreeShape) -> BTreeMap<Event, usize> {
    let fam = space.conditioning_events();
    let mut label: BTreeMap<Event, usize> = BTreeMap::new();
    let mut k = 0;
    let mut seeds: BTreeSet<Event> = shape.roots().into_iter().collect();
    while label.len() < fam.len() {
        if k > 0 {
            let unlabeled: Vec<Event> = fam.iter().copied().filter(|u| !label.contains_key(u)).collect();
            seeds = unlabeled
                .iter()
                .copied()
                .filter(|&u| !unlabeled.iter().any(|&s| s != u && u.is_subset(s)))
                .collect();
        }
        let mut frontier: Vec<Event> = seeds.iter().copied().collect();
        for &s in &seeds {
            label.insert(s, k);
        }
        while let Some(u) = frontier.pop() {
            let m = &space.table[&u];
            for &v in &fam {
                if !label.contains_key(&v) && m.measure_event(v).is_positive() && v.is_subset(u) {
                    label.insert(v, k);
                    frontier.push(v);
                }
            }
        }
        k += 1;
    }
    label
}

/// LCPS reproducing a treelike cps on every `(V, U) ∈ F × F′`.
pub fn treelike_to_lps(space: &PopperSpace) -> Result<Lps> {
    let report = space.validate(Level::Treelike);
    if !report.is_valid() {
        return Err(Error::NotTreelike(report.to_string()));
    }
    let shape = space.tree_shape().ok_or_else(|| Error::NotTreelike("F′ is not laminar".into()))?;
    let label = treelike_labels(space, &shape);
    let levels = label.values().copied().max().map_or(0, |m| m + 1);
    let n = space.n_atoms();
    let mut measures = Vec::with_capacity(levels);
    for k in 0..levels {
        let with_k: Vec<Event> = label.iter().filter(|(_, &l)| l == k).map(|(u, _)| *u).collect();
        let maximal: Vec<Event> =
            with_k.iter().copied().filter(|&u| !with_k.iter().any(|&s| s != u && u.is_subset(s))).collect();
        let w = Rational::new(1.into(), (maximal.len() as i64).into());
        let mut mass = vec![Rational::zero(); n];
        for u in &maximal {
            for (a, x) in space.table[u].masses().iter().enumerate() {
                mass[a] += x * &w;
            }
        }
        measures.push(StdMeasure::new(space.algebra.clone(), mass));
    }
    Lps::new(measures)
}

/// Does the LPS reproduce `μ(V|U)` for every `V` and every `U ∈ F′`?
pub fn lps_agrees_with(lps: &Lps, space: &PopperSpace) -> bool {
    space.table.iter().all(|(&u, m)| match lps.first_positive(u) {
        None => false,
        Some(b) => lps.measures()[b].condition(u).map(|c| &c == m).unwrap_or(false),
    })
}
