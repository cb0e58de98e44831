use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{NonstdNumber, Rational, Scalar};
use crate::lps::{lps_equiv, Lps};
use crate::measure::{same_algebra, Measure, NonstdMeasure, StdMeasure};
use crate::nps::{nps_to_lps, nps_to_popper};
use crate::popper::PopperSpace;
use crate::space::{Event, RandomVariable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndepMode {
    Exact,
    Approx,
    Popper,
}

#[derive(Clone, Copy, Debug)]
pub enum IndepModel<'a> {
    Nps(&'a NonstdMeasure),
    Popper(&'a PopperSpace),
}

/// Is `U` (conditionally) independent of `V` given `V′`?
pub fn indep_events(model: IndepModel<'_>, u: Event, v: Event, given: Event, mode: IndepMode) -> Result<bool> {
    let n = match model {
        IndepModel::Nps(nu) => nu.n_atoms(),
        IndepModel::Popper(p) => p.n_atoms(),
    };
    let full = Event::full(n);
    if ![u, v, given].iter().all(|e| e.is_subset(full)) {
        return Err(Error::AlgebraMismatch);
    }
    match (model, mode) {
        (IndepModel::Nps(nu), IndepMode::Exact) => {
            Ok(NpsIndep::from_masses(nu.event_masses()).exact(u, v, given))
        }
        (IndepModel::Nps(nu), IndepMode::Approx) => NpsIndep::from_masses(nu.event_masses()).approx(u, v, given),
        (IndepModel::Popper(p), IndepMode::Popper) => popper_indep(p, u, v, given),
        (IndepModel::Nps(_), IndepMode::Popper) => {
            Err(Error::KindMismatch("popper independence needs a Popper space".into()))
        }
        (IndepModel::Popper(_), _) => {
            Err(Error::KindMismatch("exact and approximate independence need a nonstandard measure".into()))
        }
    }
}

/// `U ∩ V′ ∉ F′`, or `μ(V|U ∩ V′) = μ(V|V′)`.
pub fn popper_indep(p: &PopperSpace, u: Event, v: Event, given: Event) -> Result<bool> {
    let ug = u.intersect(given);
    let Some(lhs) = p.cond(v, ug) else {
        return Ok(true);
    };
    let rhs = p
        .cond(v, given)
        .ok_or_else(|| Error::InvalidPopperSpace(format!("{given} is missing from F′ although {ug} is present")))?;
    Ok(lhs == rhs)
}

/// Independence queries against precomputed event masses.
#[derive(Clone, Debug)]
pub struct NpsIndep {
    mass: Vec<NonstdNumber>,
}

impl NpsIndep {
    pub fn new(nu: &NonstdMeasure) -> Self {
        Self::from_masses(nu.event_masses())
    }

    pub fn from_masses(mass: Vec<NonstdNumber>) -> Self {
        Self { mass }
    }

    fn m(&self, e: Event) -> &NonstdNumber {
        &self.mass[e.bits() as usize]
    }

    /// `ν(V|U ∩ V′) = ν(V|V′)`, by cross multiplication.
    pub fn exact(&self, u: Event, v: Event, given: Event) -> bool {
        let ug = u.intersect(given);
        let d1 = self.m(ug);
        if d1.is_zero() {
            return true;
        }
        let lhs = self.m(v.intersect(ug)) * self.m(given);
        let rhs = self.m(v.intersect(given)) * d1;
        lhs == rhs
    }

    /// Standard parts of `(ν(V|U ∩ V′), ν(V|V′))`, or `None` when `ν(U ∩ V′) = 0`.
    pub fn approx_parts(&self, u: Event, v: Event, given: Event) -> Result<Option<(Rational, Rational)>> {
        let ug = u.intersect(given);
        let d1 = self.m(ug);
        if d1.is_zero() {
            return Ok(None);
        }
        let lhs = self.m(v.intersect(ug)).ratio_standard_part(d1)?;
        let rhs = self.m(v.intersect(given)).ratio_standard_part(self.m(given))?;
        Ok(Some((lhs, rhs)))
    }

    pub fn approx(&self, u: Event, v: Event, given: Event) -> Result<bool> {
        Ok(self.approx_parts(u, v, given)?.is_none_or(|(a, b)| a == b))
    }
}

fn check_vars(n: usize, xs: &[&RandomVariable]) -> Result<()> {
    if xs.iter().all(|x| x.n_atoms() == n) {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch)
    }
}

/// Events `X = x` for each value in the sorted range.
fn level_sets(x: &RandomVariable) -> Vec<(Rational, Event)> {
    x.range().into_iter().map(|v| {
        let e = x.preimage([&v]);
        (v, e)
    }).collect()
}

/// A failing pair for weak independence, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakFailure {
    pub x: Rational,
    pub y: Rational,
    /// `true` when `X = x` fails to be approximately independent of `Y = y`.
    pub x_of_y: bool,
    pub missing_from_range: bool,
}

pub fn weak_indep_report(
    nu: &NonstdMeasure,
    x: &RandomVariable,
    y: &RandomVariable,
    require_product_range: bool,
) -> Result<Option<WeakFailure>> {
    check_vars(nu.n_atoms(), &[x, y])?;
    let q = NpsIndep::new(nu);
    let full = Event::full(nu.n_atoms());
    for (xv, xe) in level_sets(x) {
        for (yv, ye) in level_sets(y) {
            if require_product_range && xe.is_disjoint(ye) {
                return Ok(Some(WeakFailure { x: xv, y: yv, x_of_y: true, missing_from_range: true }));
            }
            if !q.approx(xe, ye, full)? {
                return Ok(Some(WeakFailure { x: xv, y: yv, x_of_y: true, missing_from_range: false }));
            }
            if !q.approx(ye, xe, full)? {
                return Ok(Some(WeakFailure { x: xv, y: yv, x_of_y: false, missing_from_range: false }));
            }
        }
    }
    Ok(None)
}

pub fn weak_indep(nu: &NonstdMeasure, x: &RandomVariable, y: &RandomVariable, require_product_range: bool) -> Result<bool> {
    Ok(weak_indep_report(nu, x, y, require_product_range)?.is_none())
}

/// First failing instance in the quantification of `approx_indep_set`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFailure {
    pub u1: Vec<Rational>,
    pub vs: Vec<Vec<Rational>>,
    pub vps: Vec<Vec<Rational>>,
    /// `st(ν(V|U ∩ V′))`
    pub lhs: Rational,
    /// `st(ν(V|V′))`
    pub rhs: Rational,
}

/// Is `X` approximately independent of `{Y_1, …, Y_n}`? Returns the first
/// failure in enumeration order (`U_1`, then the `V` tuple, then the `V′`
/// tuple, each by increasing bitmask over the sorted range).
pub fn approx_indep_set(nu: &NonstdMeasure, x: &RandomVariable, ys: &[RandomVariable]) -> Result<Option<SetFailure>> {
    approx_indep_set_with(nu, x, ys, Exec::default())
}

pub fn approx_indep_set_with(
    nu: &NonstdMeasure,
    x: &RandomVariable,
    ys: &[RandomVariable],
    exec: Exec,
) -> Result<Option<SetFailure>> {
    let n = nu.n_atoms();
    check_vars(n, &[x])?;
    check_vars(n, &ys.iter().collect::<Vec<_>>())?;
    let xl = level_sets(x);
    let yl: Vec<Vec<(Rational, Event)>> = ys.iter().map(level_sets).collect();
    // Bit layout, most significant first: U_1, V_1..V_n, V′_1..V′_n.
    let mut widths = vec![xl.len()];
    widths.extend(yl.iter().map(Vec::len));
    widths.extend(yl.iter().map(Vec::len));
    let total_bits: usize = widths.iter().sum();
    if total_bits > 40 {
        return Err(Error::InvalidSpace(format!("{total_bits} subset bits is beyond the enumeration limit")));
    }
    let q = NpsIndep::new(nu);
    let full = Event::full(n);
    let split = |idx: u64| -> Vec<u64> {
        let mut out = vec![0u64; widths.len()];
        let mut rest = idx;
        for (slot, &w) in out.iter_mut().zip(&widths).rev() {
            *slot = rest & ((1u64 << w) - 1);
            rest >>= w;
        }
        out
    };
    let event_of = |levels: &[(Rational, Event)], bits: u64| {
        levels.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(Event::empty(), |e, (_, (_, l))| e.union(*l))
    };
    let values_of = |levels: &[(Rational, Event)], bits: u64| -> Vec<Rational> {
        levels.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, (v, _))| v.clone()).collect()
    };
    let k = ys.len();
    let found = exec.find_map_first(1u64 << total_bits, |idx| {
        let parts = split(idx);
        let u = event_of(&xl, parts[0]);
        let v = (0..k).fold(full, |e, i| e.intersect(event_of(&yl[i], parts[1 + i])));
        let g = (0..k).fold(full, |e, i| e.intersect(event_of(&yl[i], parts[1 + k + i])));
        match q.approx_parts(u, v, g) {
            Err(e) => Some(Err(e)),
            Ok(Some((lhs, rhs))) if lhs != rhs => Some(Ok((parts, lhs, rhs))),
            Ok(_) => None,
        }
    });
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(e),
        Some(Ok((parts, lhs, rhs))) => Ok(Some(SetFailure {
            u1: values_of(&xl, parts[0]),
            vs: (0..k).map(|i| values_of(&yl[i], parts[1 + i])).collect(),
            vps: (0..k).map(|i| values_of(&yl[i], parts[1 + k + i])).collect(),
            lhs,
            rhs,
        })),
    }
}

/// Each `X_i` approximately independent of the others; first failing index.
pub fn approx_indep_mutual(nu: &NonstdMeasure, xs: &[RandomVariable]) -> Result<Option<(usize, SetFailure)>> {
    for i in 0..xs.len() {
        let rest: Vec<RandomVariable> =
            xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect();
        if let Some(f) = approx_indep_set(nu, &xs[i], &rest)? {
            return Ok(Some((i, f)));
        }
    }
    Ok(None)
}

/// Full joint factorization: `m(∩ X_i = x_i) = Π m(X_i = x_i)` for every
/// value tuple.
pub fn exactly_independent<T: Scalar>(m: &Measure<T>, xs: &[RandomVariable]) -> Result<bool> {
    check_vars(m.n_atoms(), &xs.iter().collect::<Vec<_>>())?;
    let levels: Vec<Vec<(T, Event)>> = xs
        .iter()
        .map(|x| level_sets(x).into_iter().map(|(_, e)| (m.measure_event(e), e)).collect())
        .collect();
    let mut idx = vec![0usize; xs.len()];
    loop {
        let (joint_ev, prod) = idx.iter().zip(&levels).fold(
            (Event::full(m.n_atoms()), T::one()),
            |(e, p), (&i, l)| (e.intersect(l[i].1), p.mul_ref(&l[i].0)),
        );
        if m.measure_event(joint_ev) != prod {
            return Ok(false);
        }
        // Mixed-radix increment.
        let mut pos = xs.len();
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `μ⃗ □ r⃗ = (1 − r⁰)μ⁰ + r⁰[(1 − r¹)μ¹ + r¹[⋯]]`
pub fn box_combine(lps: &Lps, r: &[Rational]) -> Result<StdMeasure> {
    let k = lps.len();
    if r.len() + 1 != k {
        return Err(Error::LengthMismatch { expected: k - 1, got: r.len() });
    }
    let ms = lps.measures();
    let mut acc: Vec<Rational> = ms[k - 1].masses().to_vec();
    for i in (0..k - 1).rev() {
        let one_minus = Rational::one() - &r[i];
        acc = ms[i].masses().iter().zip(&acc).map(|(m, a)| &one_minus * m + &r[i] * a).collect();
    }
    Ok(StdMeasure::new(lps.algebra().clone(), acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    BbdR,
    BbdNps,
    KrNps,
    KrSeq,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::BbdR => "bbd-r",
            WitnessKind::BbdNps => "bbd-nps",
            WitnessKind::KrNps => "kr-nps",
            WitnessKind::KrSeq => "kr-seq",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bbd-r" => Some(WitnessKind::BbdR),
            "bbd-nps" => Some(WitnessKind::BbdNps),
            "kr-nps" => Some(WitnessKind::KrNps),
            "kr-seq" => Some(WitnessKind::KrSeq),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum WitnessTarget<'a> {
    Lps(&'a Lps),
    Popper(&'a PopperSpace),
}

#[derive(Clone, Debug)]
pub enum Witness<'a> {
    RVectors(&'a [Vec<Rational>]),
    Nps(&'a NonstdMeasure),
    Sequence(&'a [StdMeasure]),
}

/// Finite obligations discharged for a strong-independence witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub accepted: bool,
    pub obligations: Vec<(String, bool)>,
    pub notes: Vec<String>,
}

impl WitnessReport {
    fn new(kind: WitnessKind) -> Self {
        Self { kind, accepted: true, obligations: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.accepted &= ok;
        self.obligations.push((name.into(), ok));
    }
}

pub fn verify_indep_witness(
    kind: WitnessKind,
    target: WitnessTarget<'_>,
    xs: &[RandomVariable],
    witness: Witness<'_>,
) -> Result<WitnessReport> {
    let mut rep = WitnessReport::new(kind);
    let shape = |what: &str| Error::KindMismatch(format!("{} needs {what}", kind.name()));
    match kind {
        WitnessKind::BbdR => {
            let WitnessTarget::Lps(lps) = target else { return Err(shape("an LPS target")) };
            let Witness::RVectors(rs) = witness else { return Err(shape("a list of r-vectors")) };
            for (j, r) in rs.iter().enumerate() {
                let open = r.iter().all(|x| x > &Rational::zero() && x < &Rational::one());
                rep.check(format!("r^{j} entries in (0,1)"), open);
                let m = box_combine(lps, r)?;
                rep.check(format!("independent under μ⃗ □ r^{j}"), exactly_independent(&m, xs)?);
            }
            rep.notes.push("convergence r^j → 0 is asserted by the caller, not verified".into());
        }
        WitnessKind::BbdNps => {
            let WitnessTarget::Lps(lps) = target else { return Err(shape("an LPS target")) };
            let Witness::Nps(nu) = witness else { return Err(shape("a nonstandard measure")) };
            if !same_algebra(nu.algebra(), lps.algebra()) {
                return Err(Error::AlgebraMismatch);
            }
            rep.check("witness is a valid nonstandard measure", nu.validate().is_valid());
            let d = nps_to_lps(nu)?;
            rep.check("witness ≈ target", lps_equiv(&d.lps, lps)?.is_equivalent());
            rep.check("independent under witness", exactly_independent(nu, xs)?);
            rep.notes.push(
                "the range of the witness is ℝ(ε), which is not an elementary extension of the reals; only ≈ and independence are checked"
                    .into(),
            );
        }
        WitnessKind::KrNps => {
            let WitnessTarget::Popper(p) = target else { return Err(shape("a Popper space target")) };
            let Witness::Nps(nu) = witness else { return Err(shape("a nonstandard measure")) };
            rep.check("witness is a valid nonstandard measure", nu.validate().is_valid());
            rep.check("F_{N→P}(witness) = target", &nps_to_popper(nu)? == p);
            rep.check("independent under witness", exactly_independent(nu, xs)?);
        }
        WitnessKind::KrSeq => {
            let WitnessTarget::Popper(p) = target else { return Err(shape("a Popper space target")) };
            let Witness::Sequence(seq) = witness else { return Err(shape("a list of standard measures")) };
            for (j, m) in seq.iter().enumerate() {
                rep.check(format!("μ_{j} is a probability measure"), m.validate().is_valid());
                let positive = p.conditioning_events().iter().all(|&u| m.measure_event(u) > Rational::zero());
                rep.check(format!("μ_{j} positive on F′"), positive);
                rep.check(format!("independent under μ_{j}"), exactly_independent(m, xs)?);
            }
            rep.notes.push("convergence μ_j → μ is asserted by the caller, not verified".into());
        }
    }
    Ok(rep)
}
