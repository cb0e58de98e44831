use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::Rational;

/// Largest supported number of atoms (events are `u64` bitmasks).
pub const MAX_ATOMS: usize = 64;

/// Finite algebra given by its atom partition of a labelled world set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceAlgebra {
    worlds: Vec<String>,
    atoms: Vec<Vec<usize>>,
}

impl SpaceAlgebra {
    /// Checked constructor; `atoms` lists world indices per block.
    pub fn new(worlds: Vec<String>, atoms: Vec<Vec<usize>>) -> Result<Self> {
        let alg = Self::new_unchecked(worlds, atoms);
        let problems = alg.problems();
        if problems.is_empty() {
            Ok(alg)
        } else {
            Err(Error::InvalidSpace(problems.join("; ")))
        }
    }

    pub fn new_unchecked(worlds: Vec<String>, mut atoms: Vec<Vec<usize>>) -> Self {
        for a in &mut atoms {
            a.sort_unstable();
        }
        Self { worlds, atoms }
    }

    /// Every world is its own atom.
    pub fn discrete<S: Into<String>>(worlds: impl IntoIterator<Item = S>) -> Self {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        let atoms = (0..worlds.len()).map(|i| vec![i]).collect();
        Self { worlds, atoms }
    }

    /// Discrete space on `w1..wn`.
    pub fn numbered(n: usize) -> Self {
        Self::discrete((1..=n).map(|i| format!("w{i}")))
    }

    /// Violated invariants, empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let distinct: BTreeSet<&String> = self.worlds.iter().collect();
        if distinct.len() != self.worlds.len() {
            out.push("world labels are not distinct".to_string());
        }
        if self.atoms.is_empty() {
            out.push("no atoms".to_string());
        }
        if self.atoms.len() > MAX_ATOMS {
            out.push(format!("more than {MAX_ATOMS} atoms"));
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.worlds.len()];
        for (ai, block) in self.atoms.iter().enumerate() {
            if block.is_empty() {
                out.push(format!("atom {ai} is empty"));
            }
            for &w in block {
                match owner.get(w) {
                    None => out.push(format!("atom {ai} names unknown world index {w}")),
                    Some(Some(prev)) => out.push(format!("world {} is in atoms {prev} and {ai}", self.worlds[w])),
                    Some(None) => owner[w] = Some(ai),
                }
            }
        }
        for (w, o) in owner.iter().enumerate() {
            if o.is_none() {
                out.push(format!("world {} is not covered by any atom", self.worlds[w]));
            }
        }
        out
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn full(&self) -> Event {
        Event::full(self.n_atoms())
    }

    /// Number of events, `2^atoms`.
    pub fn n_events(&self) -> u64 {
        1u64 << self.n_atoms()
    }

    pub fn world_index(&self, label: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == label)
    }

    /// Index of the atom holding a world.
    pub fn atom_of_world(&self, world: usize) -> Option<usize> {
        self.atoms.iter().position(|a| a.contains(&world))
    }

    /// The event consisting of exactly these worlds; fails unless the set is
    /// a union of atoms.
    pub fn event_from_worlds<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let mut worlds = BTreeSet::new();
        for l in labels {
            let w = self
                .world_index(l.as_ref())
                .ok_or_else(|| Error::InvalidSpace(format!("unknown world {:?}", l.as_ref())))?;
            worlds.insert(w);
        }
        let mut e = Event::empty();
        for (ai, block) in self.atoms.iter().enumerate() {
            let inside = block.iter().filter(|w| worlds.contains(w)).count();
            if inside == block.len() {
                e = e.with(ai);
            } else if inside > 0 {
                return Err(Error::InvalidSpace(format!("world set splits atom {ai}")));
            }
        }
        Ok(e)
    }

    pub fn check_event(&self, e: Event) -> Result<()> {
        if e.is_subset(self.full()) {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!("event {e} has atom indices beyond {}", self.n_atoms())))
        }
    }

    /// Short human name of an atom: its world label(s).
    pub fn atom_label(&self, atom: usize) -> String {
        let names: Vec<&str> = self.atoms[atom].iter().map(|&w| self.worlds[w].as_str()).collect();
        if names.len() == 1 {
            names[0].to_string()
        } else {
            format!("[{}]", names.join(","))
        }
    }

    pub fn describe_event(&self, e: Event) -> String {
        let parts: Vec<String> = e.iter().map(|a| self.atom_label(a)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Union of atoms, stored as a bitmask over atom indices.
///
/// `Ord` is lexicographic order on the sorted index lists, so `{}` < `{0}` <
/// `{0,1}` < `{0,1,2}` < `{0,2}` < `{1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Event(u64);

impl Event {
    pub const fn empty() -> Self {
        Event(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        Event(bits)
    }

    pub fn full(n_atoms: usize) -> Self {
        if n_atoms >= 64 {
            Event(u64::MAX)
        } else {
            Event((1u64 << n_atoms) - 1)
        }
    }

    pub fn singleton(atom: usize) -> Self {
        Event(1u64 << atom)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        indices.into_iter().fold(Event(0), |e, i| e.with(i))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn with(self, atom: usize) -> Self {
        Event(self.0 | (1u64 << atom))
    }

    pub fn contains(self, atom: usize) -> bool {
        atom < 64 && self.0 >> atom & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        Event(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        Event(self.0 & other.0)
    }

    pub fn minus(self, other: Self) -> Self {
        Event(self.0 & !other.0)
    }

    pub fn complement(self, n_atoms: usize) -> Self {
        Event::full(n_atoms).minus(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Atom indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, the empty set first, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Event> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(Event(cur))
        })
    }

    /// Every event of an algebra with `n_atoms` atoms, in bitmask order.
    pub fn all(n_atoms: usize) -> impl Iterator<Item = Event> {
        Event::full(n_atoms).subsets()
    }

    /// Nonempty events sorted by the lexicographic index-list order.
    pub fn all_sorted(n_atoms: usize) -> Vec<Event> {
        let mut v: Vec<Event> = Event::all(n_atoms).filter(|e| !e.is_empty()).collect();
        v.sort();
        v
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let i = diff.trailing_zeros();
        let self_has = self.0 >> i & 1 == 1;
        let lacks = if self_has { other.0 } else { self.0 };
        let higher = if i == 63 { 0 } else { u64::MAX << (i + 1) };
        // If the set lacking `i` continues past `i`, the set holding `i` is
        // smaller; otherwise the lacking set is a prefix.
        let holder_smaller = lacks & higher != 0;
        if self_has == holder_smaller {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Rational-valued function on atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomVariable {
    values: Vec<Rational>,
}

impl RandomVariable {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn zero(n_atoms: usize) -> Self {
        Self { values: vec![Rational::zero(); n_atoms] }
    }

    /// `χ_E`
    pub fn indicator(e: Event, n_atoms: usize) -> Self {
        Self {
            values: (0..n_atoms)
                .map(|a| if e.contains(a) { Rational::from_integer(1.into()) } else { Rational::zero() })
                .collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn n_atoms(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, atom: usize) -> &Rational {
        &self.values[atom]
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect() })
    }

    /// Distinct values in increasing order.
    pub fn range(&self) -> Vec<Rational> {
        let set: BTreeSet<&Rational> = self.values.iter().collect();
        set.into_iter().cloned().collect()
    }

    /// The event `X ∈ S`.
    pub fn preimage<'a>(&self, vals: impl IntoIterator<Item = &'a Rational>) -> Event {
        let vals: Vec<&Rational> = vals.into_iter().collect();
        Event::from_indices(
            self.values.iter().enumerate().filter(|(_, v)| vals.contains(v)).map(|(i, _)| i),
        )
    }

    pub fn check_algebra(&self, alg: &SpaceAlgebra) -> Result<()> {
        if self.values.len() == alg.n_atoms() {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }
}
