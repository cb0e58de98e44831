use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Arc;

use extprob::belief::{belief_query, BeliefKind, BeliefModel};
use extprob::field::{display_rational, parse_rational};
use extprob::fixtures;
use extprob::format::{parse, to_json, Document};
use extprob::independence::{
    approx_indep_mutual, approx_indep_set, exactly_independent, indep_events, verify_indep_witness,
    weak_indep_report, IndepMode, IndepModel, NpsIndep, SetFailure, WitnessTarget,
};
use extprob::lps::{lps_equiv, EquivCertificate, Lps};
use extprob::nps::{lps_to_nps, nps_aeq, nps_simeq, nps_to_lps, nps_to_popper};
use extprob::popper::{popper_to_slps, slps_to_popper, treelike_to_lps, validate_popper, Level, PopperSpace};
use extprob::{Event, NonstdMeasure, RandomVariable, Rational, SpaceAlgebra, ValidationReport};

use crate::{
    Failure, IndepArgs, IndepKind, LevelArg, ModeArg, Outcome, RelationArg, Repr, EXIT_NO, EXIT_YES,
};

fn load(path: &str) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    parse(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn level(l: LevelArg) -> Level {
    match l {
        LevelArg::Cps => Level::Cps,
        LevelArg::Popper => Level::Popper,
        LevelArg::Treelike => Level::Treelike,
    }
}

/// Invariant report for any document, with Popper tables checked at `lvl`.
fn report_for(doc: &Document, lvl: Level) -> ValidationReport {
    let alg = doc.algebra();
    let mut r = ValidationReport::default();
    match doc {
        Document::Measure(m) => r.extend(m.validate()),
        Document::Nps(m) => r.extend(m.validate()),
        Document::Lps(l) => r.extend(l.validate()),
        Document::Popper(p) => r.extend(validate_popper(p, lvl)),
        Document::Decomposition(d) => {
            r.extend(d.lps.validate());
            if d.coefficients.len() != d.lps.len() {
                r.push("length mismatch", "coefficients", format!("{} for {} measures", d.coefficients.len(), d.lps.len()));
            } else if let Ok(nu) = d.recompose() {
                r.extend(nu.validate());
            }
        }
        Document::Variable(_, x) => {
            for p in alg.problems() {
                r.push("invalid algebra", "algebra", p);
            }
            if x.check_algebra(alg).is_err() {
                r.push("length mismatch", "values", format!("{} values for {} atoms", x.n_atoms(), alg.n_atoms()));
            }
        }
        Document::Certificate(..) => {
            for p in alg.problems() {
                r.push("invalid algebra", "algebra", p);
            }
        }
        Document::Witness(w) => {
            for p in alg.problems() {
                r.push("invalid algebra", "algebra", p);
            }
            for (i, x) in w.variables.iter().enumerate() {
                if x.check_algebra(alg).is_err() {
                    r.push("length mismatch", format!("variable {i}"), format!("{} values", x.n_atoms()));
                }
            }
        }
    }
    r
}

/// Loads a document and rejects it unless it is valid.
fn load_valid(path: &str) -> Result<Document, Failure> {
    let doc = load(path)?;
    let r = report_for(&doc, Level::Popper);
    if r.is_valid() {
        Ok(doc)
    } else {
        Err(Failure::Input(format!("{path}: invalid {}\n{r}", doc.kind())))
    }
}

fn wrong_kind(path: &str, doc: &Document, want: &str) -> Failure {
    Failure::Input(format!("{path}: expected a {want} document, found {}", doc.kind()))
}

fn same_space(a: &SpaceAlgebra, b: &SpaceAlgebra) -> Result<(), Failure> {
    if a.worlds() == b.worlds() && a.atoms() == b.atoms() {
        Ok(())
    } else {
        Err(Failure::Input("documents are on different spaces".into()))
    }
}

fn rats(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(display_rational).collect();
    format!("({})", parts.join(", "))
}

fn matrix_lines(out: &mut String, name: &str, m: &[Vec<Rational>]) {
    let _ = writeln!(out, "{name}:");
    for row in m {
        let _ = writeln!(out, "  {}", rats(row));
    }
}

/// Comma-separated world labels or atom indices; empty text is `∅`.
fn parse_event(alg: &SpaceAlgebra, text: &str) -> Result<Event, Failure> {
    let text = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut labels = Vec::new();
    let mut atoms = Event::empty();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if alg.world_index(tok).is_some() {
            labels.push(tok);
        } else if let Ok(a) = tok.parse::<usize>() {
            if a >= alg.n_atoms() {
                return Err(Failure::Input(format!("atom index {a} out of range")));
            }
            atoms = atoms.with(a);
        } else {
            return Err(Failure::Input(format!("unknown world {tok:?}")));
        }
    }
    Ok(alg.event_from_worlds(&labels)?.union(atoms))
}

/// Inline `v1,v2,…` per atom, or `@path` to a variable document.
fn parse_variable(alg: &SpaceAlgebra, text: &str) -> Result<RandomVariable, Failure> {
    let x = if let Some(path) = text.strip_prefix('@') {
        match load(path)? {
            Document::Variable(a, x) => {
                same_space(&a, alg)?;
                x
            }
            other => return Err(wrong_kind(path, &other, "variable")),
        }
    } else {
        let vals = text.split(',').map(parse_rational).collect::<extprob::Result<Vec<_>>>()?;
        RandomVariable::new(vals)
    };
    x.check_algebra(alg)
        .map_err(|_| Failure::Input(format!("variable has {} values for {} atoms", x.n_atoms(), alg.n_atoms())))?;
    Ok(x)
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

pub(crate) fn validate(path: &str, lvl: LevelArg) -> Outcome {
    let doc = load(path)?;
    let r = report_for(&doc, level(lvl));
    let mut out = format!("kind: {}\natoms: {}\n", doc.kind(), doc.algebra().n_atoms());
    if let Document::Lps(l) = &doc {
        if r.is_valid() {
            let c = l.classify();
            let _ = writeln!(out, "length: {}", l.len());
            let _ = writeln!(out, "slps: {}\nmslps: {}\nlcps: {}", c.is_slps, c.is_mslps, c.is_lcps);
        }
    }
    if let Document::Popper(p) = &doc {
        let _ = writeln!(out, "level: {}", format!("{lvl:?}").to_lowercase());
        let _ = writeln!(out, "conditioning events: {}", p.table().len());
    }
    let _ = write!(out, "report: {r}");
    Ok((verdict(r.is_valid()), out))
}

pub(crate) fn convert(path: &str, from: Repr, to: Repr) -> Outcome {
    let doc = load(path)?;
    let want = match from {
        Repr::Treelike => "popper",
        Repr::Lps => "lps",
        Repr::Nps => "nps",
        Repr::Popper => "popper",
    };
    if doc.kind() != want {
        return Err(wrong_kind(path, &doc, want));
    }
    let lvl = if from == Repr::Treelike { Level::Treelike } else { Level::Popper };
    let r = report_for(&doc, lvl);
    if !r.is_valid() {
        return Err(Failure::Input(format!("{path}: invalid {}\n{r}", doc.kind())));
    }
    let out = match (doc, to) {
        (Document::Lps(l), Repr::Popper) => Document::Popper(slps_to_popper(&l)?),
        (Document::Lps(l), Repr::Nps) => Document::Nps(lps_to_nps(&l)),
        (Document::Nps(nu), Repr::Lps) => Document::Decomposition(nps_to_lps(&nu)?),
        (Document::Nps(nu), Repr::Popper) => Document::Popper(nps_to_popper(&nu)?),
        (Document::Popper(p), Repr::Lps) if from == Repr::Treelike => Document::Lps(treelike_to_lps(&p)?),
        (Document::Popper(p), Repr::Lps) => Document::Lps(popper_to_slps(&p)?),
        _ => {
            return Err(Failure::Usage(format!(
                "no conversion from {} to {}",
                format!("{from:?}").to_lowercase(),
                format!("{to:?}").to_lowercase()
            )))
        }
    };
    Ok((EXIT_YES, to_json(&out)))
}

fn certificate_summary(out: &mut String, c: &EquivCertificate, a: &Lps, b: &Lps) {
    let _ = writeln!(out, "verdict: {}", if c.is_equivalent() { "equivalent" } else { "inequivalent" });
    let _ = writeln!(out, "reduced lengths: {} and {}", c.reduced_a.len(), c.reduced_b.len());
    if let (Some(t), Some(s)) = (&c.forward, &c.backward) {
        matrix_lines(out, "forward", t);
        matrix_lines(out, "backward", s);
    }
    if let Some((x, y)) = &c.witness {
        let _ = writeln!(out, "witness X: {}", rats(x.values()));
        let _ = writeln!(out, "witness Y: {}", rats(y.values()));
        for (name, l) in [("a", a), ("b", b)] {
            let (ex, ey) = (l.expectations(x).expect("checked"), l.expectations(y).expect("checked"));
            let sign = match ex.cmp(&ey) {
                Ordering::Less => "<",
                Ordering::Equal => "=",
                Ordering::Greater => ">",
            };
            let _ = writeln!(out, "{name}: E(X) {sign} E(Y)");
        }
    }
    let _ = write!(out, "certificate verified: {}", c.verify(a, b));
}

enum Model {
    Lps(Lps),
    Nps(NonstdMeasure),
}

fn comparable(path: &str, doc: Document) -> Result<Model, Failure> {
    match doc {
        Document::Lps(l) => Ok(Model::Lps(l)),
        Document::Nps(nu) => Ok(Model::Nps(nu)),
        Document::Measure(m) => Ok(Model::Lps(Lps::new(vec![m])?)),
        other => Err(wrong_kind(path, &other, "lps, nps or measure")),
    }
}

pub(crate) fn compare(pa: &str, pb: &str, rel: RelationArg, json: bool) -> Outcome {
    let da = load_valid(pa)?;
    let db = load_valid(pb)?;
    same_space(da.algebra(), db.algebra())?;
    let (ma, mb) = (comparable(pa, da)?, comparable(pb, db)?);
    let as_lps = |m: &Model| -> Result<Lps, Failure> {
        match m {
            Model::Lps(l) => Ok(l.clone()),
            Model::Nps(nu) => Ok(nps_to_lps(nu)?.lps),
        }
    };
    let as_nps = |m: &Model| match m {
        Model::Lps(l) => lps_to_nps(l),
        Model::Nps(nu) => nu.clone(),
    };
    match rel {
        RelationArg::Aeq => {
            let cert = match (&ma, &mb) {
                (Model::Nps(x), Model::Nps(y)) => nps_aeq(x, y)?.0,
                _ => lps_equiv(&as_lps(&ma)?, &as_lps(&mb)?)?,
            };
            let (la, lb) = (as_lps(&ma)?, as_lps(&mb)?);
            if !cert.verify(&la, &lb) {
                return Err(Failure::Input("certificate failed its own check".into()));
            }
            let code = verdict(cert.is_equivalent());
            if json {
                let alg: Arc<SpaceAlgebra> = la.algebra().clone();
                return Ok((code, to_json(&Document::Certificate(alg, cert))));
            }
            let mut out = String::from("relation: aeq\n");
            certificate_summary(&mut out, &cert, &la, &lb);
            Ok((code, out))
        }
        RelationArg::Simeq => {
            if json {
                return Err(Failure::Usage("--json is only available with --relation aeq".into()));
            }
            let (na, nb) = (as_nps(&ma), as_nps(&mb));
            let holds = nps_simeq(&na, &nb)?;
            let mut out = String::from("relation: simeq\n");
            let _ = writeln!(out, "verdict: {}", if holds { "equivalent" } else { "inequivalent" });
            if !holds {
                let (pa, pb) = (nps_to_popper(&na)?, nps_to_popper(&nb)?);
                if let Some(line) = simeq_difference(&pa, &pb) {
                    let _ = write!(out, "{line}");
                }
            }
            Ok((verdict(holds), out))
        }
    }
}

/// First event where the two zero sets or conditional standard parts differ.
fn simeq_difference(a: &PopperSpace, b: &PopperSpace) -> Option<String> {
    let alg = a.algebra();
    for u in Event::all_sorted(a.n_atoms()) {
        match (a.conditional_measure(u), b.conditional_measure(u)) {
            (Some(x), Some(y)) if x != y => {
                for v in Event::all_sorted(a.n_atoms()) {
                    let (cx, cy) = (x.measure_event(v), y.measure_event(v));
                    if cx != cy {
                        return Some(format!(
                            "differs at st(ν(V|U)) for V={} U={}: {} vs {}",
                            alg.describe_event(v),
                            alg.describe_event(u),
                            display_rational(&cx),
                            display_rational(&cy)
                        ));
                    }
                }
            }
            (Some(_), None) | (None, Some(_)) => {
                return Some(format!("differs on whether ν({}) = 0", alg.describe_event(u)));
            }
            _ => {}
        }
    }
    None
}

pub(crate) fn expect(path: &str, xs: &str, ys: Option<&str>) -> Outcome {
    let doc = load_valid(path)?;
    let alg = doc.algebra().clone();
    let x = parse_variable(&alg, xs)?;
    let y = ys.map(|s| parse_variable(&alg, s)).transpose()?;
    let mut out = String::new();
    let cmp = match &doc {
        Document::Measure(m) => {
            let ex = m.expect(&x)?;
            let _ = writeln!(out, "E(X) = {}", display_rational(&ex));
            match &y {
                Some(y) => {
                    let ey = m.expect(y)?;
                    let _ = writeln!(out, "E(Y) = {}", display_rational(&ey));
                    Some(ex.cmp(&ey))
                }
                None => None,
            }
        }
        Document::Nps(nu) => {
            let ex = nu.expect(&x)?;
            let _ = writeln!(out, "E(X) = {ex}");
            let _ = writeln!(out, "st(E(X)) = {}", display_rational(&ex.standard_part()?));
            match &y {
                Some(y) => {
                    let ey = nu.expect(y)?;
                    let _ = writeln!(out, "E(Y) = {ey}");
                    let _ = writeln!(out, "st(E(Y)) = {}", display_rational(&ey.standard_part()?));
                    Some(ex.cmp(&ey))
                }
                None => None,
            }
        }
        Document::Lps(l) => {
            let _ = writeln!(out, "E(X) = {}", rats(&l.expectations(&x)?));
            match &y {
                Some(y) => {
                    let _ = writeln!(out, "E(Y) = {}", rats(&l.expectations(y)?));
                    Some(l.expect_cmp(&x, y)?)
                }
                None => None,
            }
        }
        other => return Err(wrong_kind(path, other, "measure, nps or lps")),
    };
    if let Some(c) = cmp {
        let word = match c {
            Ordering::Less => "less",
            Ordering::Equal => "equal",
            Ordering::Greater => "greater",
        };
        let _ = writeln!(out, "E(X) vs E(Y): {word}");
    }
    Ok((EXIT_YES, out))
}

fn failure_line(f: &SetFailure) -> String {
    let groups = |vs: &[Vec<Rational>]| vs.iter().map(|v| rats(v)).collect::<Vec<_>>().join(" ");
    format!(
        "fails at X∈{} Y∈[{}] given Y∈[{}]: {} vs {}",
        rats(&f.u1),
        groups(&f.vs),
        groups(&f.vps),
        display_rational(&f.lhs),
        display_rational(&f.rhs)
    )
}

fn need<'a>(e: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    e.as_deref().ok_or_else(|| Failure::Usage(format!("--kind events needs --{flag}")))
}

pub(crate) fn indep(a: &IndepArgs) -> Outcome {
    let doc = load_valid(&a.model)?;
    let alg = doc.algebra().clone();
    if a.kind == IndepKind::Events {
        let u = parse_event(&alg, need(&a.u, "u")?)?;
        let v = parse_event(&alg, need(&a.v, "v")?)?;
        let given = match &a.given {
            Some(g) => parse_event(&alg, g)?,
            None => alg.full(),
        };
        let (model, mode) = match (&doc, a.mode) {
            (Document::Nps(nu), ModeArg::Exact) => (IndepModel::Nps(nu), IndepMode::Exact),
            (Document::Nps(nu), ModeArg::Approx) => (IndepModel::Nps(nu), IndepMode::Approx),
            (Document::Popper(p), ModeArg::Popper) => (IndepModel::Popper(p), IndepMode::Popper),
            (Document::Nps(_), ModeArg::Popper) | (Document::Popper(_), _) => {
                return Err(Failure::Usage("use --mode exact|approx with nps models and --mode popper with popper models".into()))
            }
            (other, _) => return Err(wrong_kind(&a.model, other, "nps or popper")),
        };
        let holds = indep_events(model, u, v, given, mode)?;
        let mut out = format!(
            "U: {}\nV: {}\ngiven: {}\nmode: {}\n",
            alg.describe_event(u),
            alg.describe_event(v),
            alg.describe_event(given),
            format!("{:?}", a.mode).to_lowercase()
        );
        if let (Document::Nps(nu), IndepMode::Approx) = (&doc, mode) {
            match NpsIndep::new(nu).approx_parts(u, v, given)? {
                Some((l, r)) => {
                    let _ = writeln!(out, "st(ν(V|U∩V′)) = {}\nst(ν(V|V′)) = {}", display_rational(&l), display_rational(&r));
                }
                None => {
                    let _ = writeln!(out, "ν(U∩V′) = 0, so independence holds vacuously");
                }
            }
        }
        let _ = write!(out, "independent: {holds}");
        return Ok((verdict(holds), out));
    }
    let Document::Nps(nu) = &doc else {
        return Err(wrong_kind(&a.model, &doc, "nps"));
    };
    let xs = a.x.iter().map(|s| parse_variable(&alg, s)).collect::<Result<Vec<_>, _>>()?;
    let ys = a.y.iter().map(|s| parse_variable(&alg, s)).collect::<Result<Vec<_>, _>>()?;
    let mut out = format!("kind: {}\n", format!("{:?}", a.kind).to_lowercase());
    let holds = match a.kind {
        IndepKind::Weak => {
            let ([x], [y]) = (xs.as_slice(), ys.as_slice()) else {
                return Err(Failure::Usage("--kind weak needs exactly one --x and one --y".into()));
            };
            let fail = weak_indep_report(nu, x, y, a.product_range)?;
            if let Some(f) = &fail {
                let (x, y) = (display_rational(&f.x), display_rational(&f.y));
                let what = match (f.missing_from_range, f.x_of_y) {
                    (true, _) => format!("X={x} and Y={y} never occur together"),
                    (false, true) => format!("X={x} is not approximately independent of Y={y}"),
                    (false, false) => format!("Y={y} is not approximately independent of X={x}"),
                };
                let _ = writeln!(out, "fails: {what}");
            }
            fail.is_none()
        }
        IndepKind::Set => {
            let [x] = xs.as_slice() else {
                return Err(Failure::Usage("--kind set needs exactly one --x".into()));
            };
            if ys.is_empty() {
                return Err(Failure::Usage("--kind set needs at least one --y".into()));
            }
            let f = approx_indep_set(nu, x, &ys)?;
            if let Some(f) = &f {
                let _ = writeln!(out, "{}", failure_line(f));
            }
            f.is_none()
        }
        IndepKind::Mutual => {
            if xs.len() < 2 || !ys.is_empty() {
                return Err(Failure::Usage("--kind mutual needs two or more --x and no --y".into()));
            }
            let f = approx_indep_mutual(nu, &xs)?;
            if let Some((i, f)) = &f {
                let _ = writeln!(out, "variable {i}: {}", failure_line(f));
            }
            f.is_none()
        }
        IndepKind::Exact => {
            let all: Vec<RandomVariable> = xs.into_iter().chain(ys).collect();
            if all.len() < 2 {
                return Err(Failure::Usage("--kind exact needs at least two variables".into()));
            }
            exactly_independent(nu, &all)?
        }
        IndepKind::Events => unreachable!("handled above"),
    };
    let _ = write!(out, "independent: {holds}");
    Ok((verdict(holds), out))
}

pub(crate) fn verify_witness(wpath: &str, tpath: &str) -> Outcome {
    let wdoc = load_valid(wpath)?;
    let Document::Witness(w) = &wdoc else {
        return Err(wrong_kind(wpath, &wdoc, "witness"));
    };
    let tdoc = load_valid(tpath)?;
    same_space(&w.algebra, tdoc.algebra())?;
    let target = match &tdoc {
        Document::Lps(l) => WitnessTarget::Lps(l),
        Document::Popper(p) => WitnessTarget::Popper(p),
        other => return Err(wrong_kind(tpath, other, "lps or popper")),
    };
    let rep = verify_indep_witness(w.kind, target, &w.variables, w.witness())?;
    let mut out = format!("witness kind: {}\n", rep.kind.name());
    for (name, ok) in &rep.obligations {
        let _ = writeln!(out, "[{}] {name}", if *ok { "ok" } else { "fail" });
    }
    for n in &rep.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = write!(out, "verdict: {}", if rep.accepted { "accepted" } else { "rejected" });
    Ok((verdict(rep.accepted), out))
}

pub(crate) fn believe(path: &str, u: &str, kind: &str) -> Outcome {
    let doc = load_valid(path)?;
    let alg = doc.algebra().clone();
    let u = parse_event(&alg, u)?;
    let (model, kinds): (BeliefModel<'_>, &[BeliefKind]) = match &doc {
        Document::Lps(l) => (BeliefModel::Lps(l), &[BeliefKind::Certain, BeliefKind::Weak, BeliefKind::Assumed]),
        Document::Popper(p) => (BeliefModel::Popper(p), &[BeliefKind::PopperStrong, BeliefKind::PopperWeak]),
        Document::Nps(nu) => (BeliefModel::Nps(nu), &[BeliefKind::NpsCertain, BeliefKind::NpsWeak]),
        other => return Err(wrong_kind(path, other, "lps, popper or nps")),
    };
    let chosen: Vec<BeliefKind> = if kind == "all" {
        kinds.to_vec()
    } else {
        vec![BeliefKind::parse(kind).ok_or_else(|| Failure::Usage(format!("unknown belief kind {kind:?}")))?]
    };
    let mut out = format!("U: {}\n", alg.describe_event(u));
    let mut all = true;
    for k in chosen {
        let v = belief_query(model, u, k)?;
        all &= v.holds;
        let _ = write!(out, "{}: {}", k.name(), v.holds);
        if let Some(b) = v.level {
            let _ = write!(out, " (level {b})");
        }
        out.push('\n');
    }
    Ok((if kind == "all" { EXIT_YES } else { verdict(all) }, out))
}

pub(crate) fn reduce(path: &str) -> Outcome {
    let doc = load_valid(path)?;
    let Document::Lps(l) = &doc else {
        return Err(wrong_kind(path, &doc, "lps"));
    };
    Ok((EXIT_YES, to_json(&Document::Lps(l.reduce()))))
}

pub(crate) fn fixtures_list() -> Outcome {
    Ok((EXIT_YES, fixtures::NAMES.join("\n")))
}

pub(crate) fn fixtures_run(name: &str) -> Outcome {
    let names: Vec<&str> = if name == "all" { fixtures::NAMES.to_vec() } else { vec![name] };
    let mut out = String::new();
    let mut ok = true;
    for (i, n) in names.iter().enumerate() {
        let rep = fixtures::run(n).ok_or_else(|| {
            Failure::Usage(format!("unknown fixture {n:?}; known: {}", fixtures::NAMES.join(", ")))
        })?;
        let rep = rep.map_err(|e| Failure::Input(e.to_string()))?;
        ok &= rep.passed();
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{rep}");
    }
    Ok((verdict(ok), out))
}
