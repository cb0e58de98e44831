use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extprob::field::int;
use extprob::format::{nonstd_from_json, nonstd_to_json, parse, to_json, Document, WitnessData, WitnessDoc};
use extprob::independence::WitnessKind;
use extprob::lps::lps_equiv;
use extprob::nps::nps_to_lps;
use extprob::{generate, RandomVariable, SpaceAlgebra};

/// Either the discrete algebra or a random coarsening with at most 6 atoms.
fn algebra(rng: &mut ChaCha8Rng) -> Arc<SpaceAlgebra> {
    let n_worlds = rng.gen_range(1..=7);
    if rng.gen_bool(0.5) {
        return Arc::new(SpaceAlgebra::discrete((0..n_worlds).map(|i| format!("w{}", i + 1))));
    }
    let mut worlds: Vec<usize> = (0..n_worlds).collect();
    worlds.shuffle(rng);
    let k = rng.gen_range(1..=n_worlds.min(6));
    let mut atoms = vec![Vec::new(); k];
    for (i, w) in worlds.into_iter().enumerate() {
        let b = if i < k { i } else { rng.gen_range(0..k) };
        atoms[b].push(w);
    }
    let labels = (0..n_worlds).map(|i| format!("s{i}")).collect();
    Arc::new(SpaceAlgebra::new(labels, atoms).unwrap())
}

fn documents(rng: &mut ChaCha8Rng) -> Vec<Document> {
    let a = algebra(rng);
    let n = a.n_atoms();
    let len = rng.gen_range(1..=n);
    let l = generate::lps(rng, &a, len);
    let m = l.measures()[0].clone();
    let nu = generate::nps(rng, &a);
    let other = generate::lps(rng, &a, len);
    let cert = lps_equiv(&l, &other).unwrap();
    let same = lps_equiv(&l, &generate::triangular_transform(rng, &l)).unwrap();
    let x = RandomVariable::new((0..n).map(|_| int(rng.gen_range(-9..=9))).collect());
    let witness = |kind, data| {
        Document::Witness(WitnessDoc { algebra: a.clone(), kind, variables: vec![x.clone()], data })
    };
    vec![
        Document::Measure(m),
        Document::Nps(nu.clone()),
        Document::Lps(l.clone()),
        Document::Popper(generate::popper(rng, &a)),
        Document::Popper(generate::treelike(rng, &a, 3)),
        Document::Variable(a.clone(), x.clone()),
        Document::Certificate(a.clone(), cert),
        Document::Certificate(a.clone(), same),
        Document::Decomposition(nps_to_lps(&nu).unwrap()),
        witness(WitnessKind::KrNps, WitnessData::Nps(nu.clone())),
        witness(WitnessKind::KrSeq, WitnessData::Sequence(l.measures().to_vec())),
        witness(WitnessKind::BbdR, WitnessData::RVectors(vec![vec![int(1) / int(3); len - 1]])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for doc in documents(&mut rng) {
            let text = to_json(&doc);
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn nonstandard_numbers_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = algebra(&mut rng);
        let nu = generate::nps(&mut rng, &a);
        for x in nu.masses() {
            prop_assert_eq!(&nonstd_from_json(&nonstd_to_json(x)).unwrap(), x);
        }
    }
}
