//! Random instances for property tests, acceptance runs and benchmarks.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::{NonstdNumber, Rational};
use crate::lps::Lps;
use crate::measure::{NonstdMeasure, StdMeasure};
use crate::nps::{combine, schedule_from_tail};
use crate::popper::{slps_to_popper, PopperSpace};
use crate::space::{Event, SpaceAlgebra};

fn small<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(BigInt::from(rng.gen_range(lo..=hi)))
}

/// Random positive masses on `support`, summing to one.
pub fn measure_on<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>, support: Event) -> StdMeasure {
    assert!(!support.is_empty());
    let n = alg.n_atoms();
    let mut w = vec![Rational::zero(); n];
    for a in support.iter() {
        w[a] = small(rng, 1, 9);
    }
    let total: Rational = w.iter().sum();
    StdMeasure::new(alg.clone(), w.into_iter().map(|x| x / &total).collect())
}

/// Random masses on a random nonempty part of `within`.
pub fn measure_in<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>, within: Event) -> StdMeasure {
    let support = nonempty_subset(rng, within);
    measure_on(rng, alg, support)
}

pub fn nonempty_subset<R: Rng + ?Sized>(rng: &mut R, within: Event) -> Event {
    assert!(!within.is_empty());
    loop {
        let e = Event::from_indices(within.iter().filter(|_| rng.gen_bool(0.5)));
        if !e.is_empty() {
            return e;
        }
    }
}

/// An arbitrary LPS; some measures are mixtures of earlier ones, so
/// reduction has work to do.
pub fn lps<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>, len: usize) -> Lps {
    let full = alg.full();
    let mut ms: Vec<StdMeasure> = Vec::with_capacity(len);
    for _ in 0..len {
        let m = if !ms.is_empty() && rng.gen_bool(0.25) {
            let a = ms.choose(rng).expect("nonempty").clone();
            let b = measure_in(rng, alg, full);
            let t = Rational::new(BigInt::from(rng.gen_range(1..=3)), BigInt::from(4));
            let mixed = a.masses().iter().zip(b.masses()).map(|(x, y)| &t * x + (Rational::one() - &t) * y);
            StdMeasure::new(alg.clone(), mixed.collect())
        } else if !ms.is_empty() && rng.gen_bool(0.1) {
            ms.choose(rng).expect("nonempty").clone()
        } else {
            measure_in(rng, alg, full)
        };
        ms.push(m);
    }
    Lps::new(ms).expect("same algebra")
}

/// Disjoint supports in random order, covering `cover`.
pub fn slps_covering<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>, cover: Event, len: usize) -> Lps {
    let mut atoms = cover.indices();
    atoms.shuffle(rng);
    let len = len.clamp(1, atoms.len());
    let mut blocks = vec![Vec::new(); len];
    for (i, a) in atoms.into_iter().enumerate() {
        let b = if i < len { i } else { rng.gen_range(0..len) };
        blocks[b].push(a);
    }
    let ms = blocks.into_iter().map(|b| measure_on(rng, alg, Event::from_indices(b))).collect();
    Lps::new(ms).expect("same algebra")
}

/// An SLPS whose supports cover a random nonempty part of the space.
pub fn slps<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>) -> Lps {
    let cover = if rng.gen_bool(0.7) { alg.full() } else { nonempty_subset(rng, alg.full()) };
    let len = rng.gen_range(1..=cover.len());
    slps_covering(rng, alg, cover, len)
}

/// A Popper space, built from a random SLPS so that `F′` is closed.
pub fn popper<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>) -> PopperSpace {
    slps_to_popper(&slps(rng, alg)).expect("generated lps is structured")
}

/// A cps whose conditioning sets form a forest of nested partitions.
pub fn treelike<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>, max_depth: usize) -> PopperSpace {
    let mut table = BTreeMap::new();
    let roots = split(rng, alg.full());
    for r in roots {
        let m = measure_in(rng, alg, r);
        grow(rng, alg, r, m, 1, max_depth, &mut table);
    }
    PopperSpace::new(alg.clone(), table).expect("generated events are in range")
}

fn split<R: Rng + ?Sized>(rng: &mut R, u: Event) -> Vec<Event> {
    let k = rng.gen_range(1..=u.len().min(3));
    let mut parts = vec![Event::empty(); k];
    let mut atoms = u.indices();
    atoms.shuffle(rng);
    for (i, a) in atoms.into_iter().enumerate() {
        let p = if i < k { i } else { rng.gen_range(0..k) };
        parts[p] = parts[p].with(a);
    }
    parts
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    alg: &Arc<SpaceAlgebra>,
    u: Event,
    m: StdMeasure,
    depth: usize,
    max_depth: usize,
    table: &mut BTreeMap<Event, StdMeasure>,
) {
    table.insert(u, m.clone());
    if depth >= max_depth || u.len() < 2 || rng.gen_bool(0.3) {
        return;
    }
    let parts = split(rng, u);
    if parts.len() < 2 {
        return;
    }
    for x in parts {
        // CP3 forces conditioning on children with positive mass.
        let child = match m.condition(x) {
            Ok(c) => c,
            Err(_) => measure_in(rng, alg, x),
        };
        grow(rng, alg, x, child, depth + 1, max_depth, table);
    }
}

/// Coefficients `(1 − Σ, q₁ε^{e₁}, …)` with strictly increasing exponents,
/// sometimes divided by `1 + ε`.
pub fn schedule<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<NonstdNumber> {
    let mut e = 0usize;
    let one_plus = NonstdNumber::one() + NonstdNumber::eps();
    let tail = (1..len)
        .map(|_| {
            e += rng.gen_range(1..=2);
            let q = Rational::new(BigInt::from(rng.gen_range(1..=5)), BigInt::from(rng.gen_range(1..=3)));
            let c = &NonstdNumber::eps_pow(e) * &NonstdNumber::from_rational(q);
            if rng.gen_bool(0.2) {
                c.checked_div(&one_plus).expect("nonzero")
            } else {
                c
            }
        })
        .collect();
    schedule_from_tail(tail)
}

/// A random nonstandard probability measure.
pub fn nps<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>) -> NonstdMeasure {
    let len = rng.gen_range(1..=alg.n_atoms().clamp(1, 4));
    let l = lps(rng, alg, len);
    combine(&l, &schedule(rng, len)).expect("schedule length matches")
}

/// `T · A` for a random lower-triangular nonnegative `T` with positive
/// diagonal, rows renormalized.
pub fn triangular_transform<R: Rng + ?Sized>(rng: &mut R, a: &Lps) -> Lps {
    let ms = a.measures();
    let out = (0..ms.len())
        .map(|i| {
            let coeffs: Vec<Rational> = (0..=i)
                .map(|j| if j == i { small(rng, 1, 4) } else if rng.gen_bool(0.5) { small(rng, 0, 3) } else { Rational::zero() })
                .collect();
            let total: Rational = coeffs.iter().sum();
            let masses = (0..a.n_atoms())
                .map(|x| coeffs.iter().zip(ms).map(|(c, m)| c * m.mass(x)).sum::<Rational>() / &total)
                .collect();
            StdMeasure::new(a.algebra().clone(), masses)
        })
        .collect();
    Lps::new(out).expect("same algebra")
}

/// Two measures that are `≈`-equivalent by construction.
pub fn aeq_pair<R: Rng + ?Sized>(rng: &mut R, alg: &Arc<SpaceAlgebra>) -> (NonstdMeasure, NonstdMeasure) {
    let len = rng.gen_range(1..=alg.n_atoms().clamp(1, 4));
    let a = lps(rng, alg, len);
    let b = triangular_transform(rng, &a);
    let na = combine(&a, &schedule(rng, len)).expect("length matches");
    let nb = combine(&b, &schedule(rng, len)).expect("length matches");
    (na, nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::popper::Level;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let alg = Arc::new(SpaceAlgebra::numbered(n));
            for _ in 0..20 {
                assert!(lps(&mut rng, &alg, n).validate().is_valid());
                assert!(slps(&mut rng, &alg).classify().is_lcps);
                assert!(popper(&mut rng, &alg).validate(Level::Popper).is_valid());
                assert!(treelike(&mut rng, &alg, 3).validate(Level::Treelike).is_valid());
                assert!(nps(&mut rng, &alg).validate().is_valid());
                let (a, b) = aeq_pair(&mut rng, &alg);
                assert!(a.validate().is_valid() && b.validate().is_valid());
            }
        }
    }
}
