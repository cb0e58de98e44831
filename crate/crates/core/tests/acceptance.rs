//! Acceptance suite: one line per criterion with its tolerance and time
//! limit. Exits non-zero if any criterion fails.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extprob::countable::{
    exhaustive_axiom_check, fincof_cond, nu1_cond, nu4_bet_expectation, CpsFamily, FinCofEvent,
};
use extprob::field::{int, rat};
use extprob::independence::{
    approx_indep_set, indep_events, popper_indep, weak_indep, IndepMode, IndepModel, NpsIndep,
};
use extprob::lps::{lps_equiv, Lps};
use extprob::nps::{
    lps_to_nps, nps_aeq, nps_equiv, nps_simeq, nps_to_lps, nps_to_popper, schedule_from_tail, standard_schedule,
    verify_aeqchar, NpsEquivOutcome, Relation,
};
use extprob::popper::{popper_to_slps, slps_to_popper, treelike_to_lps, validate_popper, Level};
use extprob::{fixtures, generate, Event, Exec, NonstdMeasure, NonstdNumber, RandomVariable, Rational, SpaceAlgebra};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tiny() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(40))
}

/// `E_ν(X)` with `ε` replaced by `10⁻⁴⁰`, in plain rational arithmetic.
fn expect_at_tiny(nu: &NonstdMeasure, x: &RandomVariable) -> Rational {
    let t = tiny();
    nu.masses()
        .iter()
        .zip(x.values())
        .map(|(m, v)| m.eval_at(&t).expect("denominator nonzero near 0") * v)
        .sum()
}

/// Order of `E(X)` and `E(Y)` under `ν`, computed at a concrete tiny `ε`.
fn oracle_cmp(nu: &NonstdMeasure, x: &RandomVariable, y: &RandomVariable) -> Ordering {
    expect_at_tiny(nu, x).cmp(&expect_at_tiny(nu, y))
}

/// Lexicographic order of expectation vectors, from the raw masses.
fn lex_cmp(l: &Lps, x: &RandomVariable, y: &RandomVariable) -> Ordering {
    for m in l.measures() {
        let ex: Rational = m.masses().iter().zip(x.values()).map(|(a, b)| a * b).sum();
        let ey: Rational = m.masses().iter().zip(y.values()).map(|(a, b)| a * b).sum();
        match ex.cmp(&ey) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `st(x)` approximated from a concrete tiny `ε`.
fn st_close(x: &NonstdNumber, want: &Rational) -> bool {
    let v = x.eval_at(&tiny()).expect("denominator nonzero near 0");
    (v - want).abs() < Rational::new(BigInt::one(), BigInt::from(10u32).pow(20))
}

fn random_variable<R: Rng>(rng: &mut R, n: usize) -> RandomVariable {
    RandomVariable::new((0..n).map(|_| int(rng.gen_range(-3..=3))).collect())
}

fn alg(n: usize) -> Arc<SpaceAlgebra> {
    Arc::new(SpaceAlgebra::numbered(n))
}

fn c1_mcgee() -> Outcome {
    let (nu1, nu2) = fixtures::mcgee();
    ensure(nps_equiv(&nu1, &nu2, Relation::Simeq).map_err(|e| e.to_string())?.holds(), || "simeq failed".into())?;
    let NpsEquivOutcome::Aeq { certificate, a, b } = nps_equiv(&nu1, &nu2, Relation::Aeq).map_err(|e| e.to_string())?
    else {
        return Err("wrong outcome kind".into());
    };
    ensure(!certificate.is_equivalent(), || "aeq claimed equivalent".into())?;
    ensure(certificate.verify(&a.lps, &b.lps), || "certificate does not verify".into())?;
    let (x, y) = certificate.witness.clone().ok_or("no witness")?;
    ensure(oracle_cmp(&nu1, &x, &y) != oracle_cmp(&nu2, &x, &y), || "witness does not separate".into())?;
    let chi1 = RandomVariable::indicator(Event::singleton(0), 2);
    let chi2 = RandomVariable::indicator(Event::singleton(1), 2);
    let d = nu1.expect(&chi1.combine(&int(1), &chi2, &int(-1)).unwrap()).unwrap();
    ensure(d == &NonstdNumber::eps() * &NonstdNumber::from_rational(int(2)), || format!("E[χ1−χ2] = {d}"))?;
    for alpha in [int(2), rat(3, 2), rat(101, 100)] {
        let z = chi1.combine(&int(1), &chi2, &-alpha.clone()).unwrap();
        let v = nu1.expect(&z).unwrap();
        ensure(v < NonstdNumber::zero(), || format!("E[χ1 − {alpha}χ2] = {v}"))?;
        ensure(expect_at_tiny(&nu1, &z).is_negative(), || "oracle disagrees".into())?;
    }
    Ok(())
}

fn c2_approximately_indep() -> Outcome {
    let (nu1, nu2) = fixtures::approximately_indep();
    let (u, v, vp, w) = (Event::from_indices([1, 3]), Event::from_indices([2, 3]), Event::singleton(3), Event::full(4));
    let q = |nu: &NonstdMeasure, a, b, m| indep_events(IndepModel::Nps(nu), a, b, w, m).unwrap();
    // Oracle: ν(U ∩ V) = ν(U)ν(V) by direct multiplication.
    let factor = |nu: &NonstdMeasure| nu.measure_event(u.intersect(v)) == &nu.measure_event(u) * &nu.measure_event(v);
    ensure(q(&nu1, u, v, IndepMode::Exact) && factor(&nu1), || "U ⟂ V under ν₁".into())?;
    ensure(!q(&nu2, u, v, IndepMode::Exact) && !factor(&nu2), || "U not ⟂ V under ν₂".into())?;
    let (cert, da, db) = nps_aeq(&nu1, &nu2).map_err(|e| e.to_string())?;
    ensure(cert.is_equivalent() && cert.verify(&da.lps, &db.lps), || "ν₁ ≈ ν₂".into())?;
    ensure(q(&nu1, u, vp, IndepMode::Approx), || "approx(U ⟂ V′)".into())?;
    ensure(!q(&nu1, vp, u, IndepMode::Approx), || "approx(V′ ⟂ U) should fail".into())?;
    Ok(())
}

fn c3_need_approximate() -> Outcome {
    let (nu, x, y) = fixtures::need_approximate();
    ensure(weak_indep(&nu, &x, &y, true).map_err(|e| e.to_string())?, || "weak_indep".into())?;
    let f = approx_indep_set(&nu, &y, std::slice::from_ref(&x)).map_err(|e| e.to_string())?.ok_or("no failure found")?;
    ensure(f.lhs == rat(1, 3) && f.rhs == rat(1, 2), || format!("parts {} vs {}", f.lhs, f.rhs))?;
    // Oracle: rebuild the events from the reported values and evaluate at tiny ε.
    let u = y.preimage(&f.u1);
    let v = x.preimage(&f.vs[0]);
    let g = x.preimage(&f.vps[0]);
    let m = |e: Event| nu.measure_event(e);
    let lhs = m(v.intersect(u).intersect(g)).checked_div(&m(u.intersect(g))).unwrap();
    let rhs = m(v.intersect(g)).checked_div(&m(g)).unwrap();
    ensure(st_close(&lhs, &rat(1, 3)) && st_close(&rhs, &rat(1, 2)), || "oracle standard parts differ".into())
}

fn c4_popper_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..500 {
        let n = 2 + i % 4;
        let p = generate::popper(&mut rng, &alg(n));
        ensure(validate_popper(&p, Level::Popper).is_valid(), || format!("generated space {i} invalid"))?;
        let s = popper_to_slps(&p).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(s.classify().is_lcps, || format!("instance {i}: not LCPS"))?;
        ensure(slps_to_popper(&s).map_err(|e| e.to_string())? == p, || format!("instance {i}: table differs"))?;
    }
    Ok(())
}

fn c5_lps_nps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let n = 1 + i % 5;
        let len = rng.gen_range(1..=n);
        let l = generate::lps(&mut rng, &alg(n), len);
        let alt = schedule_from_tail((1..len).map(|j| &NonstdNumber::eps_pow(j + 1) * &NonstdNumber::from_rational(int(j as i64))).collect());
        for sched in [standard_schedule(len), alt] {
            ensure(verify_aeqchar(&l, &sched).map_err(|e| e.to_string())?, || format!("instance {i}: aeqchar"))?;
        }
        let nu = lps_to_nps(&l);
        let d = nps_to_lps(&nu).map_err(|e| e.to_string())?;
        ensure(d.recompose().map_err(|e| e.to_string())? == nu, || format!("instance {i}: recompose"))?;
        let cert = lps_equiv(&d.lps, &l).map_err(|e| e.to_string())?;
        ensure(cert.is_equivalent() && cert.verify(&d.lps, &l), || format!("instance {i}: not ≈"))?;
        for _ in 0..4 {
            let (x, y) = (random_variable(&mut rng, n), random_variable(&mut rng, n));
            ensure(lex_cmp(&l, &x, &y) == oracle_cmp(&nu, &x, &y), || format!("instance {i}: order oracle"))?;
        }
    }
    Ok(())
}

fn c6_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let s = generate::slps(&mut rng, &alg(1 + i % 5));
        let lhs = nps_to_popper(&lps_to_nps(&s)).map_err(|e| e.to_string())?;
        ensure(lhs == slps_to_popper(&s).map_err(|e| e.to_string())?, || format!("instance {i}"))?;
    }
    Ok(())
}

fn c7_implication_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let a = alg(1 + i % 4);
        let (na, nb) = generate::aeq_pair(&mut rng, &a);
        let (cert, _, _) = nps_aeq(&na, &nb).map_err(|e| e.to_string())?;
        ensure(cert.is_equivalent(), || format!("pair {i}: constructed pair not ≈"))?;
        ensure(nps_simeq(&na, &nb).map_err(|e| e.to_string())?, || format!("pair {i}: ≈ without ≃"))?;
    }
    let mut separated = 0;
    for i in 0..500 {
        let a = alg(1 + i % 4);
        let (na, nb) = (generate::nps(&mut rng, &a), generate::nps(&mut rng, &a));
        let (cert, da, db) = nps_aeq(&na, &nb).map_err(|e| e.to_string())?;
        if let Some((x, y)) = &cert.witness {
            separated += 1;
            ensure(cert.verify(&da.lps, &db.lps), || format!("pair {i}: witness fails lps check"))?;
            ensure(oracle_cmp(&na, x, y) != oracle_cmp(&nb, x, y), || format!("pair {i}: witness fails oracle"))?;
        } else {
            ensure(cert.is_equivalent(), || format!("pair {i}: inequivalent without witness"))?;
        }
    }
    ensure(separated > 250, || format!("only {separated} random pairs were inequivalent"))
}

fn c8_independence_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let n = 1 + i % 4;
        let nu = generate::nps(&mut rng, &alg(n));
        let p = nps_to_popper(&nu).map_err(|e| e.to_string())?;
        let q = NpsIndep::new(&nu);
        let events = Event::all_sorted(n);
        let bad = Exec::default().find_map_first_in(&events, |&u| {
            for &v in &events {
                for &g in &events {
                    let (Ok(a), Ok(b)) = (q.approx(u, v, g), popper_indep(&p, u, v, g)) else {
                        return Some((u, v, g));
                    };
                    if a != b {
                        return Some((u, v, g));
                    }
                }
            }
            None
        });
        ensure(bad.is_none(), || format!("measure {i}: verdicts differ at {bad:?}"))?;
    }
    Ok(())
}

fn c9_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..300 {
        let n = 1 + i % 5;
        let len = rng.gen_range(1..=2 * n + 1);
        let l = generate::lps(&mut rng, &alg(n), len);
        let r = l.reduce();
        ensure(r.len() <= n, || format!("instance {i}: {} > {n}", r.len()))?;
        let cert = lps_equiv(&r, &l).map_err(|e| e.to_string())?;
        ensure(cert.is_equivalent() && cert.verify(&r, &l), || format!("instance {i}: reduce not ≈"))?;
    }
    Ok(())
}

fn c10_countable() -> Outcome {
    for fam in [CpsFamily::Mu1, CpsFamily::Mu2] {
        let rep = exhaustive_axiom_check(fam, 8, Exec::default());
        ensure(rep.is_valid(), || format!("{fam:?}: {rep}"))?;
    }
    let fin = |xs: &[u64]| FinCofEvent::finite(xs.iter().copied());
    for n in 1..=20 {
        let v = fincof_cond(CpsFamily::Mu1, &fin(&[0]), &fin(&[0, n])).map_err(|e| e.to_string())?;
        ensure(v == rat(1, 2), || format!("μ¹({{0}}|{{0,{n}}}) = {v}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let random_set = |rng: &mut ChaCha8Rng| {
        let items: Vec<u64> = (0..30).filter(|_| rng.gen_bool(0.2)).collect();
        if rng.gen_bool(0.5) {
            FinCofEvent::finite(items)
        } else {
            FinCofEvent::cofinite(items)
        }
    };
    let mut pairs = 0;
    while pairs < 200 {
        let (v, u) = (random_set(&mut rng), random_set(&mut rng));
        if u.is_empty() {
            continue;
        }
        pairs += 1;
        let mu = fincof_cond(CpsFamily::Mu1, &v, &u).map_err(|e| e.to_string())?;
        let nu = nu1_cond(&v, &u).map_err(|e| e.to_string())?;
        ensure(st_close(&nu, &mu), || format!("st(ν¹({v}|{u})) ≠ {mu}"))?;
    }
    for k in 1..=6u32 {
        let want = &NonstdNumber::eps() * &NonstdNumber::from_rational(Rational::from_integer(BigInt::from((1i64 << k) + 1)));
        ensure(nu4_bet_expectation(k) == want, || format!("k = {k}"))?;
    }
    Ok(())
}

fn c11_slps_rigidity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut same, mut differ) = (0, 0);
    for i in 0..300 {
        let a = alg(1 + i % 5);
        let x = generate::slps(&mut rng, &a);
        let y = match rng.gen_range(0..3) {
            0 => x.clone(),
            1 => generate::slps(&mut rng, &a),
            _ => {
                // Same supports and order, fresh masses.
                let ms = x.measures().iter().map(|m| generate::measure_on(&mut rng, &a, m.support())).collect();
                Lps::new(ms).unwrap()
            }
        };
        let equal = x.measures() == y.measures();
        if equal {
            same += 1;
        } else {
            differ += 1;
        }
        let cert = lps_equiv(&x, &y).map_err(|e| e.to_string())?;
        ensure(cert.verify(&x, &y), || format!("pair {i}: certificate"))?;
        ensure(cert.is_equivalent() == equal, || format!("pair {i}: ≈ = {} but equal = {equal}", cert.is_equivalent()))?;
    }
    ensure(same >= 50 && differ >= 50, || format!("unbalanced sample {same}/{differ}"))
}

fn c12_treelike() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..100 {
        let n = 1 + i % 6;
        let p = generate::treelike(&mut rng, &alg(n), 3);
        ensure(validate_popper(&p, Level::Treelike).is_valid(), || format!("instance {i}: not treelike"))?;
        let l = treelike_to_lps(&p).map_err(|e| format!("instance {i}: {e}"))?;
        for (&u, m) in p.table() {
            let first = l.measures().iter().find(|mu| mu.measure_event(u) > Rational::zero());
            let mu = first.ok_or_else(|| format!("instance {i}: {u} has probability 0"))?;
            let mu_u = mu.measure_event(u);
            for v in Event::all(n) {
                let lhs = mu.measure_event(v.intersect(u)) / &mu_u;
                ensure(lhs == m.measure_event(v), || format!("instance {i}: μ({v}|{u})"))?;
            }
        }
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    tolerance: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "McGee fixture", tolerance: "exact", limit: secs(1), run: c1_mcgee },
        Criterion { id: 2, name: "event independence fixture", tolerance: "exact", limit: secs(1), run: c2_approximately_indep },
        Criterion { id: 3, name: "weak vs approximate independence fixture", tolerance: "exact", limit: secs(1), run: c3_need_approximate },
        Criterion { id: 4, name: "Popper round-trip (500)", tolerance: "exact table equality", limit: secs(20), run: c4_popper_round_trip },
        Criterion { id: 5, name: "LPS↔NPS (500)", tolerance: "exact", limit: secs(20), run: c5_lps_nps },
        Criterion { id: 6, name: "composition N→P ∘ L→N = S→P (200)", tolerance: "exact table equality", limit: secs(10), run: c6_composition },
        Criterion { id: 7, name: "≈ implies ≃; witnesses re-verify (500+500)", tolerance: "exact", limit: secs(20), run: c7_implication_chain },
        Criterion { id: 8, name: "independence transport (100)", tolerance: "exact", limit: secs(10), run: c8_independence_transport },
        Criterion { id: 9, name: "reduction bound", tolerance: "exact", limit: secs(5), run: c9_reduction },
        Criterion { id: 10, name: "countable fixtures", tolerance: "exact", limit: secs(5), run: c10_countable },
        Criterion { id: 11, name: "SLPS rigidity (300)", tolerance: "exact", limit: secs(5), run: c11_slps_rigidity },
        Criterion { id: 12, name: "treelike construction (100)", tolerance: "exact", limit: secs(10), run: c12_treelike },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let verdict = match &result {
            Ok(()) if took <= c.limit => "PASS".to_string(),
            Ok(()) => format!("FAIL (over time limit {:?})", c.limit),
            Err(msg) => format!("FAIL ({msg})"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<45} tolerance: {:<22} limit: {:>4?}  took: {:>9.3?}  {}",
            c.id, c.name, c.tolerance, c.limit, took, verdict
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
