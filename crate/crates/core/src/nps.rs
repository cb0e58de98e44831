use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{NonstdNumber, Rational};
use crate::lps::{lps_equiv, EquivCertificate, Lps};
use crate::measure::{NonstdMeasure, StdMeasure};
use crate::popper::PopperSpace;
use crate::space::Event;

/// `ν = Σ ε_i μ_i` with an LPS and infinitesimal coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub lps: Lps,
    pub coefficients: Vec<NonstdNumber>,
}

impl Decomposition {
    pub fn recompose(&self) -> Result<NonstdMeasure> {
        combine(&self.lps, &self.coefficients)
    }
}

/// `Σ c_i μ_i`
pub fn combine(lps: &Lps, coefficients: &[NonstdNumber]) -> Result<NonstdMeasure> {
    if coefficients.len() != lps.len() {
        return Err(Error::LengthMismatch { expected: lps.len(), got: coefficients.len() });
    }
    let n = lps.n_atoms();
    let mut mass = vec![NonstdNumber::zero(); n];
    for (m, c) in lps.measures().iter().zip(coefficients) {
        for (a, x) in m.masses().iter().enumerate() {
            if !x.is_zero() {
                mass[a] = &mass[a] + &(c * &NonstdNumber::from_rational(x.clone()));
            }
        }
    }
    Ok(NonstdMeasure::new(lps.algebra().clone(), mass))
}

/// Coefficients `(1 − ε − ⋯ − ε^k, ε, …, ε^k)`.
pub fn standard_schedule(len: usize) -> Vec<NonstdNumber> {
    schedule_from_tail((1..len).map(NonstdNumber::eps_pow).collect())
}

/// Prepends `1 − Σ tail`.
pub fn schedule_from_tail(tail: Vec<NonstdNumber>) -> Vec<NonstdNumber> {
    let head = tail.iter().fold(NonstdNumber::one(), |acc, t| &acc - t);
    std::iter::once(head).chain(tail).collect()
}

/// `F_{L→N}`
pub fn lps_to_nps(lps: &Lps) -> NonstdMeasure {
    combine(lps, &standard_schedule(lps.len())).expect("schedule length matches")
}

/// Writes a nonstandard measure as `Σ ε_i μ_i` with `μ⃗` an LPS.
pub fn nps_to_lps(nu: &NonstdMeasure) -> Result<Decomposition> {
    let report = nu.validate();
    if !report.is_valid() {
        return Err(Error::InvalidSpace(report.to_string()));
    }
    let alg = nu.algebra().clone();
    let n = nu.n_atoms();

    // ν = Σ_m scale_m · b_m with standard vectors b_m.
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut scales: Vec<NonstdNumber> = Vec::new();
    let mut cur: Vec<NonstdNumber> = nu.masses().to_vec();
    let mut scale = NonstdNumber::one();
    loop {
        let b: Vec<Rational> = cur.iter().map(NonstdNumber::standard_part).collect::<Result<_>>()?;
        let resid: Vec<NonstdNumber> =
            cur.iter().zip(&b).map(|(x, s)| x - &NonstdNumber::from_rational(s.clone())).collect();
        rows.push(b);
        scales.push(scale.clone());
        let Some(big) = resid.iter().map(NonstdNumber::abs).max().filter(|m| !m.is_zero()) else {
            break;
        };
        if rows.len() > n {
            return Err(Error::InvalidSpace("decomposition did not terminate".into()));
        }
        cur = resid.iter().map(|x| x.checked_div(&big)).collect::<Result<_>>()?;
        scale = &scale * &big;
    }

    // Turn each signed row into a probability measure by borrowing mass
    // from the earlier measures.
    let mut measures: Vec<Vec<Rational>> = vec![rows[0].clone()];
    let mut coeffs: Vec<NonstdNumber> = vec![scales[0].clone()];
    for (b, e) in rows.iter().zip(&scales).skip(1) {
        let mut cover = vec![Rational::zero(); n];
        for m in &measures {
            for (c, x) in cover.iter_mut().zip(m) {
                *c += x;
            }
        }
        let mut np = Rational::zero();
        for (x, c) in b.iter().zip(&cover) {
            if x.is_negative() {
                if c.is_zero() {
                    return Err(Error::InvalidSpace("negative residual outside earlier supports".into()));
                }
                let need = -x / c;
                if need > np {
                    np = need;
                }
            }
        }
        let c = &np * Rational::from_integer((measures.len() as i64).into());
        if c.is_zero() {
            return Err(Error::InvalidSpace("residual row has no negative entry".into()));
        }
        let mu: Vec<Rational> = b.iter().zip(&cover).map(|(x, cv)| (x + &np * cv) / &c).collect();
        let shift = e * &NonstdNumber::from_rational(np.clone());
        for k in coeffs.iter_mut() {
            *k = &*k - &shift;
        }
        coeffs.push(e * &NonstdNumber::from_rational(c));
        measures.push(mu);
    }
    let lps = Lps::from_rows(alg, measures)?;
    let d = Decomposition { lps, coefficients: coeffs };
    debug_assert_eq!(d.recompose().as_ref().ok(), Some(nu));
    Ok(d)
}

/// `F_{N→P}`: `F′ = {U : ν(U) ≠ 0}`, `μ(V|U) = st(ν(V ∩ U)/ν(U))`.
pub fn nps_to_popper(nu: &NonstdMeasure) -> Result<PopperSpace> {
    nps_to_popper_with(nu, Exec::default())
}

pub fn nps_to_popper_with(nu: &NonstdMeasure, exec: Exec) -> Result<PopperSpace> {
    let n = nu.n_atoms();
    let table = nu.event_masses();
    let events: Vec<u64> = (1..(1u64 << n)).collect();
    let rows = exec.map(&events, |&bits| -> Result<Option<(Event, StdMeasure)>> {
        let mu = &table[bits as usize];
        if mu.is_zero() {
            return Ok(None);
        }
        let u = Event::from_bits(bits);
        let mass = (0..n)
            .map(|a| if u.contains(a) { nu.mass(a).ratio_standard_part(mu) } else { Ok(Rational::zero()) })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((u, StdMeasure::new(nu.algebra().clone(), mass))))
    });
    let mut out = std::collections::BTreeMap::new();
    for r in rows {
        if let Some((u, m)) = r? {
            out.insert(u, m);
        }
    }
    PopperSpace::new(nu.algebra().clone(), out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Aeq,
    Simeq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NpsEquivOutcome {
    Aeq { certificate: EquivCertificate, a: Decomposition, b: Decomposition },
    Simeq(bool),
}

impl NpsEquivOutcome {
    pub fn holds(&self) -> bool {
        match self {
            NpsEquivOutcome::Aeq { certificate, .. } => certificate.is_equivalent(),
            NpsEquivOutcome::Simeq(b) => *b,
        }
    }
}

pub fn nps_equiv(a: &NonstdMeasure, b: &NonstdMeasure, relation: Relation) -> Result<NpsEquivOutcome> {
    a.check_same_algebra(b)?;
    match relation {
        Relation::Simeq => Ok(NpsEquivOutcome::Simeq(nps_simeq(a, b)?)),
        Relation::Aeq => {
            let (certificate, da, db) = nps_aeq(a, b)?;
            Ok(NpsEquivOutcome::Aeq { certificate, a: da, b: db })
        }
    }
}

/// Decides `ν_a ≈ ν_b` through decompositions; an inequivalence witness is
/// re-checked against the nonstandard expectations directly.
pub fn nps_aeq(a: &NonstdMeasure, b: &NonstdMeasure) -> Result<(EquivCertificate, Decomposition, Decomposition)> {
    a.check_same_algebra(b)?;
    let da = nps_to_lps(a)?;
    let db = nps_to_lps(b)?;
    let cert = lps_equiv(&da.lps, &db.lps)?;
    if let Some((x, y)) = &cert.witness {
        let ca = a.expect(x)?.cmp(&a.expect(y)?);
        let cb = b.expect(x)?.cmp(&b.expect(y)?);
        assert_ne!(ca, cb, "≈ witness does not separate the measures");
    }
    Ok((cert, da, db))
}

/// `ν_a ≃ ν_b`: same zero sets and same conditional standard parts.
pub fn nps_simeq(a: &NonstdMeasure, b: &NonstdMeasure) -> Result<bool> {
    a.check_same_algebra(b)?;
    Ok(nps_to_popper(a)? == nps_to_popper(b)?)
}

/// Does `Σ c_i μ_i` satisfy the coefficient conditions and land
/// `≈`-equivalent to the LPS?
pub fn verify_aeqchar(lps: &Lps, coefficients: &[NonstdNumber]) -> Result<bool> {
    if coefficients.len() != lps.len() {
        return Err(Error::LengthMismatch { expected: lps.len(), got: coefficients.len() });
    }
    if coefficients.iter().any(|c| c.signum() != Ordering::Greater) {
        return Ok(false);
    }
    let total = coefficients.iter().fold(NonstdNumber::zero(), |acc, c| &acc + c);
    if !total.is_one() {
        return Ok(false);
    }
    for w in coefficients.windows(2) {
        if !w[1].ratio_standard_part(&w[0])?.is_zero() {
            return Ok(false);
        }
    }
    let nu = combine(lps, coefficients)?;
    let d = nps_to_lps(&nu)?;
    Ok(lps_equiv(&d.lps, lps)?.is_equivalent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};
    use crate::space::SpaceAlgebra;
    use std::sync::Arc;

    fn eps() -> NonstdNumber {
        NonstdNumber::eps()
    }

    fn c(r: Rational) -> NonstdNumber {
        NonstdNumber::from_rational(r)
    }

    fn alg(n: usize) -> Arc<SpaceAlgebra> {
        Arc::new(SpaceAlgebra::numbered(n))
    }

    fn mcgee_nu1() -> NonstdMeasure {
        NonstdMeasure::new(alg(2), vec![&c(rat(1, 2)) + &eps(), &c(rat(1, 2)) - &eps()])
    }

    #[test]
    fn lps_to_nps_examples() {
        let a = alg(2);
        let l = Lps::from_rows(a.clone(), vec![vec![rat(1, 2), rat(1, 2)], vec![int(1), int(0)]]).unwrap();
        let half_eps = &eps() * &c(rat(1, 2));
        assert_eq!(lps_to_nps(&l).masses(), &[&c(rat(1, 2)) + &half_eps, &c(rat(1, 2)) - &half_eps]);
        let d = Lps::from_rows(a.clone(), vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(lps_to_nps(&d).masses(), &[&c(int(1)) - &eps(), eps()]);
        let s = Lps::from_rows(a, vec![vec![rat(1, 3), rat(2, 3)]]).unwrap();
        assert!(lps_to_nps(&s).is_standard());
    }

    #[test]
    fn decomposition_examples() {
        let d = nps_to_lps(&mcgee_nu1()).unwrap();
        assert_eq!(d.lps.rows(), vec![vec![rat(1, 2), rat(1, 2)], vec![int(1), int(0)]]);
        assert_eq!(d.coefficients, vec![&c(int(1)) - &(&eps() * &c(int(2))), &eps() * &c(int(2))]);

        let nu = NonstdMeasure::new(alg(2), vec![&c(int(1)) - &eps(), eps()]);
        let d = nps_to_lps(&nu).unwrap();
        assert_eq!(d.lps.rows(), vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
        assert_eq!(d.coefficients, vec![&c(int(1)) - &eps(), eps()]);

        let st = NonstdMeasure::new(alg(3), vec![c(rat(1, 3)), c(rat(1, 3)), c(rat(1, 3))]);
        let d = nps_to_lps(&st).unwrap();
        assert_eq!(d.lps.len(), 1);
        assert_eq!(d.coefficients, vec![NonstdNumber::one()]);
    }

    #[test]
    fn popper_image_examples() {
        let p = nps_to_popper(&mcgee_nu1()).unwrap();
        assert_eq!(p.conditioning_events().len(), 3);
        assert_eq!(p.cond(Event::singleton(0), Event::full(2)), Some(rat(1, 2)));
        let nu = NonstdMeasure::new(alg(2), vec![&c(int(1)) - &eps(), eps()]);
        let p = nps_to_popper(&nu).unwrap();
        assert_eq!(p.cond(Event::singleton(1), Event::full(2)), Some(int(0)));
        assert_eq!(p.cond(Event::singleton(1), Event::singleton(1)), Some(int(1)));
    }

    #[test]
    fn mcgee_equivalences() {
        let nu2 = NonstdMeasure::new(alg(2), vec![c(rat(1, 2)), c(rat(1, 2))]);
        assert!(nps_equiv(&mcgee_nu1(), &nu2, Relation::Simeq).unwrap().holds());
        let out = nps_equiv(&mcgee_nu1(), &nu2, Relation::Aeq).unwrap();
        assert!(!out.holds());
        let NpsEquivOutcome::Aeq { certificate, .. } = out else { unreachable!() };
        let (x, y) = certificate.witness.unwrap();
        assert_eq!(x.values(), &[int(1), int(0)]);
        assert_eq!(y.values(), &[int(0), int(1)]);
        assert!(nps_equiv(&nu2, &nu2, Relation::Aeq).unwrap().holds());
    }

    #[test]
    fn aeqchar_examples() {
        let l = Lps::from_rows(alg(2), vec![vec![rat(1, 2), rat(1, 2)], vec![int(1), int(0)]]).unwrap();
        assert!(verify_aeqchar(&l, &[&c(int(1)) - &eps(), eps()]).unwrap());
        let two_eps = &eps() * &c(int(2));
        assert!(verify_aeqchar(&l, &[&c(int(1)) - &two_eps, two_eps]).unwrap());
        assert!(!verify_aeqchar(&l, &[c(rat(1, 2)), c(rat(1, 2))]).unwrap());
        assert!(matches!(verify_aeqchar(&l, &[NonstdNumber::one()]), Err(Error::LengthMismatch { .. })));
    }
}
