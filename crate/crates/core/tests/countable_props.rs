use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use extprob::countable::{
    fincof_cond, fincof_nps_value, nu1_cond, nu4_coefficients, sampled_axiom_check, CpsFamily, FinCofBits,
    FinCofEvent, NpsFamily,
};
use extprob::field::EpsPolynomial;
use extprob::{NonstdNumber, Rational};

const UNIVERSE: u64 = 200;

/// A chain `V ⊆ X ⊆ U` drawn from depths in `{0, …, 3}` per element, plus
/// how many of the three sets are cofinite (monotone along the chain).
fn chain() -> impl Strategy<Value = (FinCofEvent, FinCofEvent, FinCofEvent)> {
    (prop::collection::vec((0..UNIVERSE, 0u8..=3), 0..24), 0usize..=3).prop_map(|(depths, cof)| {
        let mut sets = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
        let mut seen = BTreeSet::new();
        for (k, d) in depths {
            if !seen.insert(k) {
                continue;
            }
            for (i, s) in sets.iter_mut().enumerate() {
                if d as usize >= 3 - i {
                    s.insert(k);
                }
            }
        }
        let make = |i: usize| {
            if i + cof >= 3 {
                FinCofEvent::cofinite(seen.difference(&sets[i]).copied())
            } else {
                FinCofEvent::finite(sets[i].iter().copied())
            }
        };
        (make(0), make(1), make(2))
    })
    .prop_filter("U nonempty", |(_, _, u)| !u.is_empty())
}

fn fincof() -> impl Strategy<Value = FinCofEvent> {
    (prop::collection::btree_set(0..UNIVERSE, 0..12), any::<bool>()).prop_map(|(s, cof)| {
        if cof {
            FinCofEvent::cofinite(s)
        } else {
            FinCofEvent::finite(s)
        }
    })
}

fn small_fincof() -> impl Strategy<Value = (FinCofEvent, FinCofBits)> {
    (any::<u16>(), any::<bool>()).prop_map(|(bits, cofinite)| {
        let b = FinCofBits { cofinite, bits: bits as u64 };
        (b.to_event(), b)
    })
}

/// Direct reading of the two families on a finite conditioning set.
fn oracle(family: CpsFamily, v: &FinCofEvent, u: &FinCofEvent) -> Rational {
    let items: Vec<u64> = u.support.iter().copied().collect();
    let inside: Vec<u64> = items.iter().copied().filter(|k| v.contains(*k)).collect();
    match family {
        CpsFamily::Mu1 => Rational::new(BigInt::from(inside.len()), BigInt::from(items.len())),
        CpsFamily::Mu2 => {
            if v.contains(*items.last().unwrap()) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn axioms_hold_on_larger_chains(triples in prop::collection::vec(chain(), 1..16)) {
        for family in [CpsFamily::Mu1, CpsFamily::Mu2] {
            let report = sampled_axiom_check(family, &triples);
            prop_assert!(report.is_valid(), "{}", report);
        }
    }

    #[test]
    fn finite_conditionals_match_direct_counting(v in fincof(), u in fincof()) {
        prop_assume!(u.is_finite() && !u.is_empty());
        for family in [CpsFamily::Mu1, CpsFamily::Mu2] {
            prop_assert_eq!(fincof_cond(family, &v, &u).unwrap(), oracle(family, &v, &u));
        }
    }

    #[test]
    fn standard_part_of_nu1_is_mu1(v in fincof(), u in fincof()) {
        prop_assume!(!u.is_empty());
        let st = nu1_cond(&v, &u).unwrap().standard_part().unwrap();
        prop_assert_eq!(st, fincof_cond(CpsFamily::Mu1, &v, &u).unwrap());
    }

    #[test]
    fn bitmask_and_set_forms_agree(a in small_fincof(), b in small_fincof()) {
        let ((ve, vb), (ue, ub)) = (a, b);
        prop_assume!(!ue.is_empty());
        for family in [CpsFamily::Mu1, CpsFamily::Mu2] {
            prop_assert_eq!(fincof_cond(family, &vb, &ub).unwrap(), fincof_cond(family, &ve, &ue).unwrap());
        }
    }

    #[test]
    fn nu4_tail_after_even_prefix(m in 1u64..=30) {
        let prefix: Vec<u64> = (0..2 * m).collect();
        let tail = fincof_nps_value(NpsFamily::Nu4, &FinCofEvent::cofinite(prefix.iter().copied()));
        let whole = fincof_nps_value(NpsFamily::Nu4, &FinCofEvent::naturals());
        let singles = prefix
            .iter()
            .fold(NonstdNumber::zero(), |acc, &k| &acc + &fincof_nps_value(NpsFamily::Nu4, &FinCofEvent::finite([k])));
        let want = NonstdNumber::from_poly(EpsPolynomial::constant(Rational::new(BigInt::one(), BigInt::one() << (2 * m))));
        prop_assert_eq!(&whole - &singles, want.clone());
        prop_assert_eq!(tail, want);
        let b_sum: Rational = (1..=2 * m).map(|j| nu4_coefficients(j).1).sum();
        prop_assert!(b_sum.is_zero());
    }
}
