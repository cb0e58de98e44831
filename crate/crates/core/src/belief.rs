use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{NonstdNumber, Rational};
use crate::lps::Lps;
use crate::measure::NonstdMeasure;
use crate::popper::PopperSpace;
use crate::space::Event;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BeliefKind {
    Certain,
    Weak,
    Assumed,
    PopperStrong,
    PopperWeak,
    NpsCertain,
    NpsWeak,
}

impl BeliefKind {
    pub const ALL: [BeliefKind; 7] = [
        BeliefKind::Certain,
        BeliefKind::Weak,
        BeliefKind::Assumed,
        BeliefKind::PopperStrong,
        BeliefKind::PopperWeak,
        BeliefKind::NpsCertain,
        BeliefKind::NpsWeak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BeliefKind::Certain => "certain",
            BeliefKind::Weak => "weak",
            BeliefKind::Assumed => "assumed",
            BeliefKind::PopperStrong => "popper-strong",
            BeliefKind::PopperWeak => "popper-weak",
            BeliefKind::NpsCertain => "nps-certain",
            BeliefKind::NpsWeak => "nps-weak",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum BeliefModel<'a> {
    Lps(&'a Lps),
    Popper(&'a PopperSpace),
    Nps(&'a NonstdMeasure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefVerdict {
    pub holds: bool,
    /// Witnessing level for `assumed`.
    pub level: Option<usize>,
}

impl BeliefVerdict {
    fn plain(holds: bool) -> Self {
        Self { holds, level: None }
    }
}

pub fn belief_query(model: BeliefModel<'_>, u: Event, kind: BeliefKind) -> Result<BeliefVerdict> {
    let n = match model {
        BeliefModel::Lps(l) => l.n_atoms(),
        BeliefModel::Popper(p) => p.n_atoms(),
        BeliefModel::Nps(nu) => nu.n_atoms(),
    };
    if !u.is_subset(Event::full(n)) {
        return Err(Error::AlgebraMismatch);
    }
    let mismatch = || Error::KindMismatch(format!("{} belief is not defined for this model", kind.name()));
    match (model, kind) {
        (BeliefModel::Lps(l), BeliefKind::Certain) => {
            Ok(BeliefVerdict::plain(l.measure_vector(u).iter().all(One::is_one)))
        }
        (BeliefModel::Lps(l), BeliefKind::Weak) => {
            Ok(BeliefVerdict::plain(l.measures().first().is_some_and(|m| m.measure_event(u).is_one())))
        }
        (BeliefModel::Lps(l), BeliefKind::Assumed) => {
            let level = assumption_level(l, u);
            Ok(BeliefVerdict { holds: level.is_some(), level })
        }
        (BeliefModel::Popper(p), BeliefKind::PopperStrong) => {
            Ok(BeliefVerdict::plain(p.table().values().all(|m| m.measure_event(u).is_one())))
        }
        (BeliefModel::Popper(p), BeliefKind::PopperWeak) => {
            let full = Event::full(n);
            let top = p
                .conditional_measure(full)
                .ok_or_else(|| Error::InvalidPopperSpace("weak belief needs W ∈ F′".into()))?;
            let holds = p
                .table()
                .iter()
                .filter(|(v, _)| top.measure_event(**v) > Rational::zero())
                .all(|(_, m)| m.measure_event(u).is_one());
            Ok(BeliefVerdict::plain(holds))
        }
        (BeliefModel::Nps(nu), BeliefKind::NpsCertain) => Ok(BeliefVerdict::plain(nu.measure_event(u).is_one())),
        (BeliefModel::Nps(nu), BeliefKind::NpsWeak) => {
            Ok(BeliefVerdict::plain(NonstdNumber::standard_part(&nu.measure_event(u))?.is_one()))
        }
        _ => Err(mismatch()),
    }
}

/// The level `β` at which `U` is assumed, if any: measure one up to `β`,
/// measure zero after, and `U` covered by the supports up to `β`.
pub fn assumption_level(lps: &Lps, u: Event) -> Option<usize> {
    let v = lps.measure_vector(u);
    let ms = lps.measures();
    (0..ms.len()).find(|&b| {
        v[..=b].iter().all(One::is_one)
            && v[b + 1..].iter().all(Zero::is_zero)
            && u.is_subset(ms[..=b].iter().fold(Event::empty(), |s, m| s.union(m.support())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};
    use crate::nps::nps_to_popper;
    use crate::space::SpaceAlgebra;
    use std::sync::Arc;

    #[test]
    fn lps_beliefs() {
        let l = Lps::from_rows(Arc::new(SpaceAlgebra::numbered(2)), vec![vec![int(1), int(0)], vec![int(0), int(1)]])
            .unwrap();
        let u = Event::singleton(0);
        let q = |k| belief_query(BeliefModel::Lps(&l), u, k).unwrap();
        assert!(q(BeliefKind::Weak).holds);
        assert!(!q(BeliefKind::Certain).holds);
        assert_eq!(q(BeliefKind::Assumed), BeliefVerdict { holds: true, level: Some(0) });
        assert!(matches!(belief_query(BeliefModel::Lps(&l), u, BeliefKind::NpsWeak), Err(Error::KindMismatch(_))));

        let l = Lps::from_rows(
            Arc::new(SpaceAlgebra::numbered(3)),
            vec![vec![int(1), int(0), int(0)], vec![int(0), rat(1, 2), rat(1, 2)]],
        )
        .unwrap();
        let r = belief_query(BeliefModel::Lps(&l), Event::from_indices([0, 1]), BeliefKind::Assumed).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn support_condition_is_checked() {
        // U = {a, b} has measure one at level 0, but b is outside every support.
        let l = Lps::from_rows(
            Arc::new(SpaceAlgebra::numbered(3)),
            vec![vec![int(1), int(0), int(0)], vec![int(0), int(0), int(1)]],
        )
        .unwrap();
        assert_eq!(assumption_level(&l, Event::from_indices([0, 1])), None);
        assert_eq!(assumption_level(&l, Event::from_indices([0])), Some(0));
    }

    #[test]
    fn nps_and_popper_beliefs() {
        let eps = NonstdNumber::eps();
        let nu = NonstdMeasure::new(Arc::new(SpaceAlgebra::numbered(2)), vec![&NonstdNumber::one() - &eps, eps]);
        let u = Event::singleton(0);
        assert!(belief_query(BeliefModel::Nps(&nu), u, BeliefKind::NpsWeak).unwrap().holds);
        assert!(!belief_query(BeliefModel::Nps(&nu), u, BeliefKind::NpsCertain).unwrap().holds);
        let p = nps_to_popper(&nu).unwrap();
        assert!(belief_query(BeliefModel::Popper(&p), u, BeliefKind::PopperWeak).unwrap().holds);
        assert!(!belief_query(BeliefModel::Popper(&p), u, BeliefKind::PopperStrong).unwrap().holds);
    }
}
