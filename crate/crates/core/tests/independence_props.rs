use std::sync::Arc;

use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extprob::field::int;
use extprob::independence::{
    approx_indep_set, approx_indep_set_with, exactly_independent, indep_events, weak_indep, IndepMode, IndepModel,
    NpsIndep,
};
use extprob::nps::{combine, nps_to_popper};
use extprob::{generate, Event, Exec, NonstdMeasure, NonstdNumber, RandomVariable, SpaceAlgebra};

fn alg(n: usize) -> Arc<SpaceAlgebra> {
    Arc::new(SpaceAlgebra::numbered(n))
}

fn triples(n: usize) -> impl Iterator<Item = (Event, Event, Event)> {
    Event::all(n).flat_map(move |u| Event::all(n).flat_map(move |v| Event::all(n).map(move |g| (u, v, g))))
}

/// Product of two random nonstandard marginals on a `k × l` grid, with the
/// coordinate random variables.
fn product(rng: &mut ChaCha8Rng, k: usize, l: usize) -> (NonstdMeasure, RandomVariable, RandomVariable) {
    let p = generate::nps(rng, &alg(k));
    let q = generate::nps(rng, &alg(l));
    let mut mass = Vec::with_capacity(k * l);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..k {
        for j in 0..l {
            mass.push(p.mass(i) * q.mass(j));
            xs.push(int(i as i64));
            ys.push(int(j as i64));
        }
    }
    (NonstdMeasure::new(alg(k * l), mass), RandomVariable::new(xs), RandomVariable::new(ys))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_independence_implies_approximate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let nu = generate::nps(&mut rng, &alg(n));
        let ix = NpsIndep::new(&nu);
        for (u, v, g) in triples(n) {
            if ix.exact(u, v, g) {
                prop_assert!(ix.approx(u, v, g).unwrap(), "U={} V={} V'={}", u, v, g);
            }
        }
    }

    #[test]
    fn approximate_verdicts_are_invariant_under_aeq(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let a = alg(n);
        let (x, y) = if rng.gen_bool(0.5) {
            generate::aeq_pair(&mut rng, &a)
        } else {
            let len = rng.gen_range(1..=n);
            let l = generate::lps(&mut rng, &a, len);
            let s1 = generate::schedule(&mut rng, len);
            let s2 = generate::schedule(&mut rng, len);
            (combine(&l, &s1).unwrap(), combine(&l, &s2).unwrap())
        };
        let (ix, iy) = (NpsIndep::new(&x), NpsIndep::new(&y));
        for (u, v, g) in triples(n) {
            prop_assert_eq!(ix.approx(u, v, g).unwrap(), iy.approx(u, v, g).unwrap());
        }
    }

    #[test]
    fn approximate_verdicts_transport_to_popper_image(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let nu = generate::nps(&mut rng, &alg(n));
        let p = nps_to_popper(&nu).unwrap();
        let ix = NpsIndep::new(&nu);
        for (u, v, g) in triples(n) {
            let popper = indep_events(IndepModel::Popper(&p), u, v, g, IndepMode::Popper).unwrap();
            prop_assert_eq!(ix.approx(u, v, g).unwrap(), popper);
        }
    }

    #[test]
    fn cached_and_direct_queries_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let nu = generate::nps(&mut rng, &alg(n));
        let ix = NpsIndep::new(&nu);
        for (u, v, g) in triples(n) {
            prop_assert_eq!(indep_events(IndepModel::Nps(&nu), u, v, g, IndepMode::Exact).unwrap(), ix.exact(u, v, g));
            prop_assert_eq!(indep_events(IndepModel::Nps(&nu), u, v, g, IndepMode::Approx).unwrap(), ix.approx(u, v, g).unwrap());
        }
    }

    #[test]
    fn product_measures_are_independent_in_every_sense(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=3);
        let (nu, x, y) = product(&mut rng, k, l);
        prop_assert!(nu.validate().is_valid());
        prop_assert!(exactly_independent(&nu, &[x.clone(), y.clone()]).unwrap());
        prop_assert!(weak_indep(&nu, &x, &y, false).unwrap());
        prop_assert!(approx_indep_set(&nu, &x, &[y.clone()]).unwrap().is_none());
        prop_assert!(approx_indep_set(&nu, &y, &[x.clone()]).unwrap().is_none());
    }

    #[test]
    fn set_independence_is_mode_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let nu = generate::nps(&mut rng, &alg(n));
        let rv = |rng: &mut ChaCha8Rng| RandomVariable::new((0..n).map(|_| int(rng.gen_range(0..=2))).collect());
        let x = rv(&mut rng);
        let ys = [rv(&mut rng), rv(&mut rng)];
        prop_assert_eq!(
            approx_indep_set_with(&nu, &x, &ys, Exec::Parallel).unwrap(),
            approx_indep_set_with(&nu, &x, &ys, Exec::Sequential).unwrap()
        );
    }
}

#[test]
fn popper_independence_can_be_asymmetric() {
    let eps = NonstdNumber::eps();
    let e2 = NonstdNumber::eps_pow(2);
    let two_eps = &eps + &eps;
    let nu = NonstdMeasure::new(
        alg(4),
        vec![&(&NonstdNumber::one() - &two_eps) + &e2, &eps - &e2, &eps - &e2, e2.clone()],
    );
    let p = nps_to_popper(&nu).unwrap();
    let (u, vp, w) = (Event::from_indices([1, 3]), Event::singleton(3), Event::full(4));
    assert!(indep_events(IndepModel::Popper(&p), u, vp, w, IndepMode::Popper).unwrap());
    assert!(!indep_events(IndepModel::Popper(&p), vp, u, w, IndepMode::Popper).unwrap());
}
