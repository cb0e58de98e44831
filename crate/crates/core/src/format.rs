//! JSON documents for every core type.
//!
//! Rationals are `"a/b"` strings, nonstandard numbers are sparse numerator
//! and denominator term lists, and events are sorted atom-index arrays.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, EpsPolynomial, NonstdNumber, Rational};
use crate::independence::{Witness, WitnessKind};
use crate::lps::{EquivCertificate, Lps, Verdict};
use crate::measure::{Measure, NonstdMeasure, StdMeasure};
use crate::nps::Decomposition;
use crate::popper::PopperSpace;
use crate::space::{Event, RandomVariable, SpaceAlgebra};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessData {
    RVectors(Vec<Vec<Rational>>),
    Nps(NonstdMeasure),
    Sequence(Vec<StdMeasure>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessDoc {
    pub algebra: Arc<SpaceAlgebra>,
    pub kind: WitnessKind,
    pub variables: Vec<RandomVariable>,
    pub data: WitnessData,
}

impl WitnessDoc {
    pub fn witness(&self) -> Witness<'_> {
        match &self.data {
            WitnessData::RVectors(r) => Witness::RVectors(r),
            WitnessData::Nps(nu) => Witness::Nps(nu),
            WitnessData::Sequence(s) => Witness::Sequence(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Measure(StdMeasure),
    Nps(NonstdMeasure),
    Lps(Lps),
    Popper(PopperSpace),
    Variable(Arc<SpaceAlgebra>, RandomVariable),
    Certificate(Arc<SpaceAlgebra>, EquivCertificate),
    Decomposition(Decomposition),
    Witness(WitnessDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Measure(_) => "measure",
            Document::Nps(_) => "nps",
            Document::Lps(_) => "lps",
            Document::Popper(_) => "popper",
            Document::Variable(..) => "variable",
            Document::Certificate(..) => "certificate",
            Document::Decomposition(_) => "decomposition",
            Document::Witness(_) => "witness",
        }
    }

    pub fn algebra(&self) -> &Arc<SpaceAlgebra> {
        match self {
            Document::Measure(m) => m.algebra(),
            Document::Nps(m) => m.algebra(),
            Document::Lps(l) => l.algebra(),
            Document::Popper(p) => p.algebra(),
            Document::Variable(a, _) | Document::Certificate(a, _) => a,
            Document::Decomposition(d) => d.lps.algebra(),
            Document::Witness(w) => &w.algebra,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<Vec<usize>>>,
}

/// `[[exp, "a/b"], …]` terms of numerator and denominator.
#[derive(Serialize, Deserialize)]
pub struct NonstdJson {
    num: Vec<(usize, String)>,
    den: Vec<(usize, String)>,
}

#[derive(Serialize, Deserialize)]
struct PopperEntry {
    given: Vec<usize>,
    masses: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Payload {
    Measure { masses: Vec<String> },
    Nps { masses: Vec<NonstdJson> },
    Lps { measures: Vec<Vec<String>> },
    Popper { table: Vec<PopperEntry> },
    Variable { values: Vec<String> },
    Certificate {
        verdict: String,
        reduced_a: Vec<Vec<String>>,
        reduced_b: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forward: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        backward: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<(Vec<String>, Vec<String>)>,
    },
    Decomposition { measures: Vec<Vec<String>>, coefficients: Vec<NonstdJson> },
    Witness {
        witness_kind: String,
        #[serde(default)]
        variables: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_vectors: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nps: Option<Vec<NonstdJson>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<Vec<Vec<String>>>,
    },
}

#[derive(Serialize, Deserialize)]
struct DocJson {
    format_version: u32,
    space: SpaceJson,
    #[serde(flatten)]
    payload: Payload,
}

fn rats(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

fn matrix(m: &[Vec<Rational>]) -> Vec<Vec<String>> {
    m.iter().map(|r| rats(r)).collect()
}

pub fn nonstd_to_json(x: &NonstdNumber) -> NonstdJson {
    let terms = |p: &EpsPolynomial| p.terms().map(|(e, c)| (e, format_rational(c))).collect();
    NonstdJson { num: terms(x.num()), den: terms(x.den()) }
}

pub fn nonstd_from_json(j: &NonstdJson) -> Result<NonstdNumber> {
    let poly = |ts: &[(usize, String)]| -> Result<EpsPolynomial> {
        EpsPolynomial::from_terms(ts.iter().map(|(e, c)| Ok((*e, parse_rational(c)?))).collect::<Result<_>>()?)
    };
    let den = poly(&j.den)?;
    if den.is_zero() {
        return Err(Error::Format("zero denominator".into()));
    }
    NonstdNumber::new(poly(&j.num)?, den)
}

fn space_json(alg: &SpaceAlgebra) -> SpaceJson {
    let discrete = alg.atoms().len() == alg.worlds().len()
        && alg.atoms().iter().enumerate().all(|(i, a)| a.as_slice() == [i]);
    SpaceJson { worlds: alg.worlds().to_vec(), atoms: (!discrete).then(|| alg.atoms().to_vec()) }
}

pub fn to_value(doc: &Document) -> serde_json::Value {
    let space = space_json(doc.algebra());
    let payload = match doc {
        Document::Measure(m) => Payload::Measure { masses: rats(m.masses()) },
        Document::Nps(m) => Payload::Nps { masses: m.masses().iter().map(nonstd_to_json).collect() },
        Document::Lps(l) => Payload::Lps { measures: matrix(&l.rows()) },
        Document::Popper(p) => Payload::Popper {
            table: p
                .table()
                .iter()
                .map(|(u, m)| PopperEntry { given: u.indices(), masses: rats(m.masses()) })
                .collect(),
        },
        Document::Variable(_, x) => Payload::Variable { values: rats(x.values()) },
        Document::Certificate(_, c) => Payload::Certificate {
            verdict: match c.verdict {
                Verdict::Equivalent => "equivalent",
                Verdict::Inequivalent => "inequivalent",
            }
            .into(),
            reduced_a: matrix(&c.reduced_a),
            reduced_b: matrix(&c.reduced_b),
            forward: c.forward.as_deref().map(matrix),
            backward: c.backward.as_deref().map(matrix),
            witness: c.witness.as_ref().map(|(x, y)| (rats(x.values()), rats(y.values()))),
        },
        Document::Decomposition(d) => Payload::Decomposition {
            measures: matrix(&d.lps.rows()),
            coefficients: d.coefficients.iter().map(nonstd_to_json).collect(),
        },
        Document::Witness(w) => {
            let mut p = Payload::Witness {
                witness_kind: w.kind.name().into(),
                variables: w.variables.iter().map(|x| rats(x.values())).collect(),
                r_vectors: None,
                nps: None,
                sequence: None,
            };
            if let Payload::Witness { r_vectors, nps, sequence, .. } = &mut p {
                match &w.data {
                    WitnessData::RVectors(r) => *r_vectors = Some(matrix(r)),
                    WitnessData::Nps(nu) => *nps = Some(nu.masses().iter().map(nonstd_to_json).collect()),
                    WitnessData::Sequence(s) => *sequence = Some(s.iter().map(|m| rats(m.masses())).collect()),
                }
            }
            p
        }
    };
    serde_json::to_value(DocJson { format_version: FORMAT_VERSION, space, payload }).expect("documents serialize")
}

pub fn to_json(doc: &Document) -> String {
    serde_json::to_string_pretty(&to_value(doc)).expect("documents serialize")
}

fn parse_rats(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

fn parse_matrix(m: &[Vec<String>]) -> Result<Vec<Vec<Rational>>> {
    m.iter().map(|r| parse_rats(r)).collect()
}

fn sized(what: &str, n: usize, got: usize) -> Result<()> {
    if n == got {
        Ok(())
    } else {
        Err(Error::Format(format!("{what}: expected {n} entries, got {got}")))
    }
}

fn std_measure(alg: &Arc<SpaceAlgebra>, masses: &[String], what: &str) -> Result<StdMeasure> {
    let m = parse_rats(masses)?;
    sized(what, alg.n_atoms(), m.len())?;
    Ok(Measure::new(alg.clone(), m))
}

fn nps_measure(alg: &Arc<SpaceAlgebra>, masses: &[NonstdJson]) -> Result<NonstdMeasure> {
    sized("nps masses", alg.n_atoms(), masses.len())?;
    Ok(Measure::new(alg.clone(), masses.iter().map(nonstd_from_json).collect::<Result<_>>()?))
}

fn variable(alg: &SpaceAlgebra, values: &[String]) -> Result<RandomVariable> {
    let v = parse_rats(values)?;
    sized("variable values", alg.n_atoms(), v.len())?;
    Ok(RandomVariable::new(v))
}

fn lps_rows(alg: &Arc<SpaceAlgebra>, rows: &[Vec<String>]) -> Result<Lps> {
    let rows = parse_matrix(rows)?;
    for r in &rows {
        sized("lps measure", alg.n_atoms(), r.len())?;
    }
    if rows.is_empty() {
        return Err(Error::Format("an lps needs at least one measure".into()));
    }
    Lps::from_rows(alg.clone(), rows)
}

/// Parses a document. The algebra is not checked for being a partition;
/// `SpaceAlgebra::problems` reports that.
pub fn parse(text: &str) -> Result<Document> {
    let doc: DocJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {}", doc.format_version)));
    }
    let SpaceJson { worlds, atoms } = doc.space;
    let alg = Arc::new(match atoms {
        Some(a) => SpaceAlgebra::new_unchecked(worlds, a),
        None => SpaceAlgebra::discrete(worlds),
    });
    if alg.n_atoms() > crate::space::MAX_ATOMS {
        return Err(Error::Format(format!("at most {} atoms are supported", crate::space::MAX_ATOMS)));
    }
    Ok(match doc.payload {
        Payload::Measure { masses } => Document::Measure(std_measure(&alg, &masses, "measure masses")?),
        Payload::Nps { masses } => Document::Nps(nps_measure(&alg, &masses)?),
        Payload::Lps { measures } => Document::Lps(lps_rows(&alg, &measures)?),
        Payload::Popper { table } => {
            let mut t = BTreeMap::new();
            for entry in table {
                let u = Event::from_indices(entry.given.iter().copied());
                if entry.given.iter().any(|&a| a >= alg.n_atoms()) || u.len() != entry.given.len() {
                    return Err(Error::Format(format!("bad conditioning event {:?}", entry.given)));
                }
                let m = std_measure(&alg, &entry.masses, "conditional masses")?;
                if t.insert(u, m).is_some() {
                    return Err(Error::Format(format!("conditioning event {u} listed twice")));
                }
            }
            Document::Popper(PopperSpace::new(alg, t)?)
        }
        Payload::Variable { values } => {
            let x = variable(&alg, &values)?;
            Document::Variable(alg, x)
        }
        Payload::Certificate { verdict, reduced_a, reduced_b, forward, backward, witness } => {
            let verdict = match verdict.as_str() {
                "equivalent" => Verdict::Equivalent,
                "inequivalent" => Verdict::Inequivalent,
                other => return Err(Error::Format(format!("unknown verdict {other:?}"))),
            };
            let witness = match witness {
                Some((x, y)) => Some((variable(&alg, &x)?, variable(&alg, &y)?)),
                None => None,
            };
            let cert = EquivCertificate {
                verdict,
                reduced_a: parse_matrix(&reduced_a)?,
                reduced_b: parse_matrix(&reduced_b)?,
                forward: forward.as_deref().map(parse_matrix).transpose()?,
                backward: backward.as_deref().map(parse_matrix).transpose()?,
                witness,
            };
            Document::Certificate(alg, cert)
        }
        Payload::Decomposition { measures, coefficients } => {
            let lps = lps_rows(&alg, &measures)?;
            let coefficients: Vec<NonstdNumber> = coefficients.iter().map(nonstd_from_json).collect::<Result<_>>()?;
            sized("coefficients", lps.len(), coefficients.len())?;
            Document::Decomposition(Decomposition { lps, coefficients })
        }
        Payload::Witness { witness_kind, variables, r_vectors, nps, sequence } => {
            let kind = WitnessKind::parse(&witness_kind)
                .ok_or_else(|| Error::Format(format!("unknown witness kind {witness_kind:?}")))?;
            let variables = variables.iter().map(|v| variable(&alg, v)).collect::<Result<_>>()?;
            let data = match (r_vectors, nps, sequence) {
                (Some(r), None, None) => WitnessData::RVectors(parse_matrix(&r)?),
                (None, Some(n), None) => WitnessData::Nps(nps_measure(&alg, &n)?),
                (None, None, Some(s)) => WitnessData::Sequence(
                    s.iter().map(|m| std_measure(&alg, m, "sequence measure")).collect::<Result<_>>()?,
                ),
                _ => return Err(Error::Format("a witness needs exactly one of r_vectors, nps, sequence".into())),
            };
            Document::Witness(WitnessDoc { algebra: alg, kind, variables, data })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};
    use crate::fixtures;
    use num_traits::One;

    fn round_trip(doc: Document) {
        let text = to_json(&doc);
        assert_eq!(parse(&text).unwrap(), doc, "{text}");
    }

    #[test]
    fn nonstd_encoding() {
        let e = NonstdNumber::eps();
        let x = &(&NonstdNumber::one() - &e).checked_div(&(&NonstdNumber::one() + &e)).unwrap() * &e;
        let j = serde_json::to_string(&nonstd_to_json(&x)).unwrap();
        assert_eq!(j, r#"{"num":[[1,"1/1"],[2,"-1/1"]],"den":[[0,"1/1"],[1,"1/1"]]}"#);
        assert_eq!(nonstd_from_json(&serde_json::from_str(&j).unwrap()).unwrap(), x);
    }

    #[test]
    fn documents_round_trip() {
        let (nu1, nu2) = fixtures::mcgee();
        round_trip(Document::Nps(nu1.clone()));
        let alg = nu1.algebra().clone();
        round_trip(Document::Measure(StdMeasure::new(alg.clone(), vec![rat(1, 3), rat(2, 3)])));
        let lps = Lps::from_rows(alg.clone(), vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        round_trip(Document::Lps(lps.clone()));
        round_trip(Document::Popper(crate::popper::slps_to_popper(&lps).unwrap()));
        round_trip(Document::Variable(alg.clone(), RandomVariable::new(vec![int(1), rat(-1, 2)])));
        let (cert, d, _) = crate::nps::nps_aeq(&nu1, &nu2).unwrap();
        round_trip(Document::Certificate(alg.clone(), cert));
        round_trip(Document::Decomposition(d));
        round_trip(Document::Witness(WitnessDoc {
            algebra: alg.clone(),
            kind: WitnessKind::KrNps,
            variables: vec![RandomVariable::new(vec![int(0), int(1)])],
            data: WitnessData::Nps(nu2),
        }));
        let coarse = Arc::new(SpaceAlgebra::new(vec!["a".into(), "b".into(), "c".into()], vec![vec![0, 2], vec![1]]).unwrap());
        round_trip(Document::Measure(StdMeasure::new(coarse, vec![rat(1, 2), rat(1, 2)])));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse("{").is_err());
        let bad_len = r#"{"format_version":1,"space":{"worlds":["a","b"]},"kind":"measure","masses":["1"]}"#;
        assert!(matches!(parse(bad_len), Err(Error::Format(_))));
        let bad_ver = r#"{"format_version":9,"space":{"worlds":["a"]},"kind":"measure","masses":["1"]}"#;
        assert!(parse(bad_ver).is_err());
        let ok = r#"{"format_version":1,"space":{"worlds":["a","b"]},"kind":"measure","masses":["1/2","1/2"]}"#;
        assert!(parse(ok).is_ok());
    }
}
