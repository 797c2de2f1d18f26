//! Up-sets of the poset of meet-irreducible congruences, the map M and the
//! families S(A) and H(A).
//!
//! An up-set is a bitmask over positions in `Cm`, so at most 64
//! meet-irreducibles are supported; the configured cap is usually far lower
//! because the number of up-sets grows exponentially.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::analysis::Analysis;
use crate::fregean::{NaturalOrder, TermSearch};
use crate::lattice::CongruenceLattice;
use crate::pip::BooleanGroup;
use crate::status::Clause;

pub const HARD_CM_LIMIT: usize = 64;

/// Up to this many up-sets the maximality of `↔` is checked exhaustively.
pub const EQUIV_SCAN_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum RepError {
    #[error("cm-too-large: {count} meet-irreducible congruences exceed the cap of {cap}; raise --cap-cm (at most {HARD_CM_LIMIT})")]
    CmTooLarge { count: usize, cap: usize },
    #[error("groups-unavailable: {0}")]
    GroupsUnavailable(String),
}

impl RepError {
    pub fn code(&self) -> &'static str {
        match self {
            RepError::CmTooLarge { .. } => "cm-too-large",
            RepError::GroupsUnavailable(_) => "groups-unavailable",
        }
    }
}

/// A subset of `Cm` by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UpSet(pub u64);

impl UpSet {
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn subset_of(self, other: UpSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn positions(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }
}

impl Serialize for UpSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.positions().serialize(s)
    }
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `Cm` with its order, as bitmasks.
#[derive(Debug, Clone)]
pub struct CmPoset {
    /// Lattice index of each position.
    pub cm: Vec<usize>,
    /// `up[i]`: positions `j` with `cm[i] ≤ cm[j]`.
    up: Vec<u64>,
    down: Vec<u64>,
    full: u64,
}

impl CmPoset {
    pub fn new(lat: &CongruenceLattice) -> Self {
        let cm = lat.cm().to_vec();
        let k = cm.len();
        assert!(k <= HARD_CM_LIMIT);
        let mut up = vec![0u64; k];
        let mut down = vec![0u64; k];
        for i in 0..k {
            for j in 0..k {
                if lat.leq(cm[i], cm[j]) {
                    up[i] |= 1 << j;
                    down[j] |= 1 << i;
                }
            }
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        CmPoset { cm, up, down, full }
    }

    pub fn len(&self) -> usize {
        self.cm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cm.is_empty()
    }

    pub fn full(&self) -> UpSet {
        UpSet(self.full)
    }

    pub fn position(&self, lattice_index: usize) -> Option<usize> {
        self.cm.iter().position(|&c| c == lattice_index)
    }

    pub fn from_lattice_indices(&self, items: impl IntoIterator<Item = usize>) -> UpSet {
        UpSet(
            items
                .into_iter()
                .map(|i| 1u64 << self.position(i).expect("meet-irreducible"))
                .fold(0, |a, b| a | b),
        )
    }

    pub fn lattice_indices(&self, s: UpSet) -> Vec<usize> {
        s.positions().into_iter().map(|p| self.cm[p]).collect()
    }

    pub fn upclosure(&self, s: UpSet) -> UpSet {
        UpSet(s.positions().iter().fold(0, |acc, &i| acc | self.up[i]))
    }

    pub fn downclosure(&self, s: UpSet) -> UpSet {
        UpSet(s.positions().iter().fold(0, |acc, &i| acc | self.down[i]))
    }

    pub fn is_upset(&self, s: UpSet) -> bool {
        self.upclosure(s) == s
    }

    pub fn complement(&self, s: UpSet) -> UpSet {
        UpSet(!s.0 & self.full)
    }

    /// `S → T = ((S ∖ T)↓)′`.
    pub fn arrow(&self, s: UpSet, t: UpSet) -> UpSet {
        self.complement(self.downclosure(UpSet(s.0 & !t.0)))
    }

    /// `S ↔ T = ((S ÷ T)↓)′`.
    pub fn equiv(&self, s: UpSet, t: UpSet) -> UpSet {
        self.complement(self.downclosure(UpSet(s.0 ^ t.0)))
    }

    /// All up-sets ordered by size, then by mask.
    pub fn upsets(&self) -> Vec<UpSet> {
        let k = self.len();
        let mut out = Vec::new();
        // Decide positions from the top down: a position may join only if
        // everything strictly above it already has.
        fn rec(p: &CmPoset, i: usize, acc: u64, out: &mut Vec<UpSet>) {
            if i == 0 {
                out.push(UpSet(acc));
                return;
            }
            let j = i - 1;
            rec(p, j, acc, out);
            let above = p.up[j] & !(1u64 << j);
            if above & !acc == 0 {
                rec(p, j, acc | 1 << j, out);
            }
        }
        rec(self, k, 0, &mut out);
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }
}

/// Outcome of reconstructing an element from a hereditary set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "element", rename_all = "kebab-case")]
pub enum ElementChoice {
    Represented(usize),
    /// The minimal candidate does not map back onto the set.
    NotRepresentable(usize),
}

#[derive(Debug, Clone)]
pub struct Representation {
    pub poset: CmPoset,
    pub upsets: Vec<UpSet>,
    pub s_family: Vec<UpSet>,
    pub h_family: Vec<UpSet>,
    /// `M(φ)` for every congruence, by lattice index.
    pub m_con: Vec<UpSet>,
    /// `M(a)` for every element.
    pub m_elem: Vec<UpSet>,
    /// Per PIP class: members, and `U⁺` computed as `M(η⁺)`.
    pub class_sets: Vec<(UpSet, UpSet)>,
    pub groups: Vec<BooleanGroup>,
    /// Whether `M(η⁺) = U↑ ∖ U` held for every class.
    pub u_plus_agrees: bool,
}

impl Representation {
    pub fn build(an: &Analysis) -> Result<Self, RepError> {
        let lat = an.lattice();
        let alg = an.algebra();
        let count = lat.cm().len();
        let cap = an.config.cap_cm.min(HARD_CM_LIMIT);
        if count > cap {
            return Err(RepError::CmTooLarge { count, cap });
        }
        let groups = an.valid_groups().ok_or_else(|| {
            let err = an
                .groups()
                .iter()
                .find_map(|g| g.as_ref().err())
                .map(|e| e.to_string())
                .unwrap_or_default();
            RepError::GroupsUnavailable(err)
        })?;
        let poset = CmPoset::new(lat);
        let upsets = poset.upsets();
        let m_con: Vec<UpSet> = (0..lat.len())
            .map(|phi| poset.from_lattice_indices(lat.cm_above(phi)))
            .collect();
        let one = alg.one();
        let m_elem: Vec<UpSet> = (0..alg.size())
            .map(|a| {
                poset.from_lattice_indices(
                    lat.cm()
                        .iter()
                        .copied()
                        .filter(|&mu| lat.get(mu).related(one, a)),
                )
            })
            .collect();

        let mut u_plus_agrees = true;
        let class_sets: Vec<(UpSet, UpSet)> = an
            .pip()
            .classes
            .iter()
            .map(|c| {
                let members = poset.from_lattice_indices(c.members.iter().copied());
                let plus = m_con[c.plus];
                let alt = UpSet(poset.upclosure(members).0 & !members.0);
                u_plus_agrees &= alt == plus;
                (members, plus)
            })
            .collect();

        let marks = |z: UpSet, ci: usize| -> Vec<bool> {
            let g = &groups[ci];
            g.elements
                .iter()
                .enumerate()
                .map(|(i, &e)| i == 0 || z.contains(poset.position(e).unwrap()))
                .collect()
        };
        let s_family: Vec<UpSet> = upsets
            .iter()
            .copied()
            .filter(|&z| (0..groups.len()).all(|ci| groups[ci].is_subgroup(&marks(z, ci))))
            .collect();
        let h_family: Vec<UpSet> = upsets
            .iter()
            .copied()
            .filter(|&z| {
                (0..groups.len()).all(|ci| {
                    let (_, plus) = class_sets[ci];
                    if !plus.subset_of(z) {
                        return true;
                    }
                    let m = marks(z, ci);
                    m.iter().all(|&b| b) || groups[ci].is_hyperplane(&m)
                })
            })
            .collect();

        Ok(Representation {
            poset,
            upsets,
            s_family,
            h_family,
            m_con,
            m_elem,
            class_sets,
            groups,
            u_plus_agrees,
        })
    }

    pub fn in_s(&self, z: UpSet) -> bool {
        self.s_family
            .binary_search_by_key(&(z.len(), z.0), |s| (s.len(), s.0))
            .is_ok()
    }

    pub fn in_h(&self, z: UpSet) -> bool {
        self.h_family
            .binary_search_by_key(&(z.len(), z.0), |s| (s.len(), s.0))
            .is_ok()
    }

    /// Meet of the congruences in `z`; ∇ for the empty set.
    pub fn meet_of(&self, lat: &CongruenceLattice, z: UpSet) -> usize {
        lat.meet_all(self.poset.lattice_indices(z))
    }

    /// The natural-order-minimal `c` with `(1, c) ∈ ⋀Z`, least index on ties.
    pub fn element_from_hereditary(
        &self,
        lat: &CongruenceLattice,
        order: &NaturalOrder,
        one: usize,
        z: UpSet,
    ) -> ElementChoice {
        let meet = lat.get(self.meet_of(lat, z));
        let candidates: Vec<usize> = (0..lat.universe_size())
            .filter(|&c| meet.related(one, c))
            .collect();
        let c = order.minimal(&candidates)[0];
        if self.m_elem[c] == z {
            ElementChoice::Represented(c)
        } else {
            ElementChoice::NotRepresentable(c)
        }
    }
}

/// Counts for the comparison of `H(A)` with the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageCounts {
    pub h: usize,
    pub universe: usize,
    pub element_image: usize,
    pub surjective: bool,
}

/// Raw results of the representation checks. Hypotheses are not judged
/// here; the check suite decides which clauses apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentationReport {
    pub cm: Vec<usize>,
    pub upsets: usize,
    pub s_size: usize,
    pub h_size: usize,
    pub con_size: usize,
    /// `M` is injective on congruences and reverses order.
    pub m_injective: Clause,
    /// `M(Con) = S(A)`; witness is a congruence outside S or an unmatched set.
    pub s_bijection: Clause,
    /// `M(Θ(a, b)) ∈ H(A)`; witness `(a, b)`.
    pub principal_in_h: Clause,
    /// `H(A)` closed under `↔`; witness is a pair of masks.
    pub h_closed_under_equiv: Clause,
    /// `M(Θ(a, b)) = M(a) ↔ M(b)`; witness `(a, b)`.
    pub principal_is_equiv: Clause,
    /// For `S ∈ S(A)` and `μ ≥ ⋀S` in Cm, `μ ∈ S`; witness `(mask, μ)`.
    pub meet_closed: Clause,
    /// `S ↔ T` is the largest up-set agreeing on S and T.
    pub equiv_is_largest: Clause,
    /// `H(A) ⊆ S(A) ⊆ Up(Cm)`.
    pub families_nested: Clause,
    /// `M(η⁺) = U↑ ∖ U` for every class.
    pub u_plus_agrees: Clause,
    /// For `Z ∈ H(A)`: `U⁺ ⊄ Z` implies `Z ∩ U = ∅`; witness `(mask, class)`.
    pub disjoint_when_not_above: Clause,
    /// For `Z ∈ H(A)` and `|U| > 1`: `Z ∩ U = ∅` implies `U⁺ ⊄ Z`.
    pub converse_for_large_classes: Clause,
    /// Number of `(Z, U)` with `|U| = 1`, `Z ∩ U = ∅` and `U⁺ ⊆ Z`.
    pub converse_exceptions_singletons: usize,
    /// For `Z ∈ H(A)` with `U⁺ ⊆ Z`: `⋀Z ≤ η⁺`.
    pub meet_below_plus: Clause,
    /// When a principal congruence term e exists: `M(e(a, b)) = M(a) ↔ M(b)`
    /// and `a ↦ M(a)` is a bijection onto `H(A)`.
    pub pc_term_transport: Option<Clause>,
    /// Reconstruction of elements from hereditary sets, in `H(A)` order.
    pub reconstruction: Vec<ElementChoice>,
    pub counts: ImageCounts,
    pub s_family: Vec<UpSet>,
    pub h_family: Vec<UpSet>,
    pub element_map: Vec<UpSet>,
}

fn first<T>(it: impl IntoIterator<Item = T>, pred: impl FnMut(&T) -> bool) -> Option<T> {
    it.into_iter().find(pred)
}

pub fn verify_representation(an: &Analysis) -> Result<RepresentationReport, RepError> {
    let rep = an.representation().as_ref().map_err(|e| e.clone())?;
    let lat = an.lattice();
    let alg = an.algebra();
    let n = alg.size();
    let one = alg.one();
    let p = &rep.poset;
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));

    let m_injective = {
        let distinct: HashSet<UpSet> = rep.m_con.iter().copied().collect();
        let reversing = first(
            (0..lat.len()).flat_map(|x| (0..lat.len()).map(move |y| (x, y))),
            |&(x, y)| lat.leq(x, y) && !rep.m_con[y].subset_of(rep.m_con[x]),
        );
        if distinct.len() != lat.len() {
            Clause::fail(vec![lat.len(), distinct.len()])
        } else {
            Clause::from_witness(reversing.map(|(x, y)| vec![x, y]))
        }
    };

    let s_bijection = {
        let outside = first(0..lat.len(), |&phi| !rep.in_s(rep.m_con[phi]));
        let image: HashSet<UpSet> = rep.m_con.iter().copied().collect();
        let unmatched = first(rep.s_family.iter().copied(), |s| !image.contains(s));
        match (outside, unmatched) {
            (Some(phi), _) => Clause::fail(vec![phi]),
            (None, Some(s)) => Clause::fail(vec![s.0 as usize]),
            (None, None) => Clause::pass(),
        }
    };

    let principal_in_h = Clause::from_witness(
        first(pairs(), |&(a, b)| !rep.in_h(rep.m_con[lat.principal(a, b)]))
            .map(|(a, b)| vec![a, b]),
    );

    let h_closed_under_equiv = Clause::from_witness(
        first(
            rep.h_family
                .iter()
                .flat_map(|&s| rep.h_family.iter().map(move |&t| (s, t))),
            |&(s, t)| !rep.in_h(p.equiv(s, t)),
        )
        .map(|(s, t)| vec![s.0 as usize, t.0 as usize]),
    );

    let principal_is_equiv = Clause::from_witness(
        first(pairs(), |&(a, b)| {
            rep.m_con[lat.principal(a, b)] != p.equiv(rep.m_elem[a], rep.m_elem[b])
        })
        .map(|(a, b)| vec![a, b]),
    );

    let meet_closed = Clause::from_witness(
        first(
            rep.s_family
                .iter()
                .flat_map(|&s| (0..p.len()).map(move |i| (s, i))),
            |&(s, i)| lat.leq(rep.meet_of(lat, s), p.cm[i]) && !s.contains(i),
        )
        .map(|(s, i)| vec![s.0 as usize, p.cm[i]]),
    );

    let equiv_is_largest = if rep.upsets.len() <= EQUIV_SCAN_LIMIT {
        let ups = &rep.upsets;
        let largest = |s: UpSet, t: UpSet| {
            ups.iter()
                .copied()
                .filter(|c| c.0 & s.0 == c.0 & t.0)
                .max_by_key(|c| c.len())
                .filter(|best| {
                    ups.iter()
                        .all(|c| c.0 & s.0 != c.0 & t.0 || c.subset_of(*best))
                })
        };
        Clause::from_witness(
            first(
                ups.iter().flat_map(|&s| ups.iter().map(move |&t| (s, t))),
                |&(s, t)| largest(s, t) != Some(p.equiv(s, t)),
            )
            .map(|(s, t)| vec![s.0 as usize, t.0 as usize]),
        )
    } else {
        Clause::with_status(crate::status::Status::Unknown)
    };

    let families_nested = Clause::from_witness(
        first(rep.h_family.iter().copied(), |&h| !rep.in_s(h))
            .map(|h| vec![h.0 as usize])
            .or_else(|| {
                first(rep.s_family.iter().copied(), |&s| !p.is_upset(s)).map(|s| vec![s.0 as usize])
            }),
    );

    let u_plus_agrees = if rep.u_plus_agrees {
        Clause::pass()
    } else {
        Clause::fail(vec![])
    };

    let classes = &rep.class_sets;
    let h_class_pairs = || {
        rep.h_family.iter().flat_map(move |&z| {
            classes
                .iter()
                .enumerate()
                .map(move |(ci, &(u, plus))| (z, ci, u, plus))
        })
    };
    let disjoint_when_not_above = Clause::from_witness(
        first(h_class_pairs(), |&(z, _, u, plus)| {
            !plus.subset_of(z) && z.0 & u.0 != 0
        })
        .map(|(z, ci, _, _)| vec![z.0 as usize, ci]),
    );
    let converse_for_large_classes = Clause::from_witness(
        first(h_class_pairs(), |&(z, _, u, plus)| {
            u.len() > 1 && z.0 & u.0 == 0 && plus.subset_of(z)
        })
        .map(|(z, ci, _, _)| vec![z.0 as usize, ci]),
    );
    let converse_exceptions_singletons = h_class_pairs()
        .filter(|&(z, _, u, plus)| u.len() == 1 && z.0 & u.0 == 0 && plus.subset_of(z))
        .count();
    let pip = an.pip();
    let meet_below_plus = Clause::from_witness(
        first(h_class_pairs(), |&(z, ci, _, plus)| {
            plus.subset_of(z) && !lat.leq(rep.meet_of(lat, z), pip.classes[ci].plus)
        })
        .map(|(z, ci, _, _)| vec![z.0 as usize, ci]),
    );

    let image: HashSet<UpSet> = rep.m_elem.iter().copied().collect();
    let h_set: HashSet<UpSet> = rep.h_family.iter().copied().collect();
    let bijective = image.len() == n && image == h_set;

    let pc_term_transport = match an.pc_term() {
        TermSearch::Found { table, .. } => {
            let bad = first(pairs(), |&(a, b)| {
                let e = table[a * n + b] as usize;
                rep.m_elem[e] != p.equiv(rep.m_elem[a], rep.m_elem[b])
            });
            Some(match bad {
                Some((a, b)) => Clause::fail(vec![a, b]),
                None if !bijective => Clause::fail(vec![]),
                None => Clause::pass(),
            })
        }
        _ => None,
    };

    let reconstruction = match NaturalOrder::new(alg, lat) {
        Ok(order) => rep
            .h_family
            .iter()
            .map(|&z| rep.element_from_hereditary(lat, &order, one, z))
            .collect(),
        Err(_) => Vec::new(),
    };

    Ok(RepresentationReport {
        cm: p.cm.clone(),
        upsets: rep.upsets.len(),
        s_size: rep.s_family.len(),
        h_size: rep.h_family.len(),
        con_size: lat.len(),
        m_injective,
        s_bijection,
        principal_in_h,
        h_closed_under_equiv,
        principal_is_equiv,
        meet_closed,
        equiv_is_largest,
        families_nested,
        u_plus_agrees,
        disjoint_when_not_above,
        converse_for_large_classes,
        converse_exceptions_singletons,
        meet_below_plus,
        pc_term_transport,
        reconstruction,
        counts: ImageCounts {
            h: rep.h_family.len(),
            universe: n,
            element_image: image.len(),
            surjective: image.len() == rep.h_family.len() && image == h_set,
        },
        s_family: rep.s_family.clone(),
        h_family: rep.h_family.clone(),
        element_map: rep.m_elem.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AnalysisConfig;
    use crate::fixtures;

    fn rep(an: &Analysis) -> &Representation {
        an.representation().as_ref().unwrap()
    }

    #[test]
    fn hilb3_families() {
        let an = Analysis::with_defaults(fixtures::hilb3());
        let r = rep(&an);
        assert_eq!(r.upsets.len(), 4);
        assert_eq!(r.s_family.len(), 4);
        assert_eq!(r.h_family.len(), 4);
        let p = &r.poset;
        let (a, b) = (UpSet(1), UpSet(2));
        assert_eq!(p.equiv(a, b), UpSet(0));
        assert_eq!(p.equiv(UpSet(3), a), a);
        assert_eq!(p.equiv(a, a), p.full());
        assert_eq!(r.m_con[an.lattice().top()], UpSet(0));
        assert_eq!(r.m_con[0], UpSet(3));
        assert_eq!(r.m_con[1], a);
        assert_eq!(r.m_elem, vec![UpSet(3), a, b]);

        let order = NaturalOrder::new(an.algebra(), an.lattice()).unwrap();
        let lat = an.lattice();
        assert_eq!(
            r.element_from_hereditary(lat, &order, 0, a),
            ElementChoice::Represented(1)
        );
        assert_eq!(
            r.element_from_hereditary(lat, &order, 0, p.full()),
            ElementChoice::Represented(0)
        );
        assert_eq!(
            r.element_from_hereditary(lat, &order, 0, UpSet(0)),
            ElementChoice::NotRepresentable(1)
        );
    }

    #[test]
    fn bg4_families() {
        let an = Analysis::with_defaults(fixtures::bg4());
        let r = rep(&an);
        assert_eq!(r.upsets.len(), 8);
        assert_eq!(
            r.s_family,
            vec![UpSet(0), UpSet(1), UpSet(2), UpSet(4), UpSet(7)]
        );
        assert_eq!(r.h_family, vec![UpSet(1), UpSet(2), UpSet(4), UpSet(7)]);
        assert_eq!(r.m_elem, vec![UpSet(7), UpSet(1), UpSet(2), UpSet(4)]);
        let report = verify_representation(&an).unwrap();
        assert!(report.counts.surjective);
        assert_eq!(
            report.pc_term_transport.as_ref().map(|c| c.status),
            Some(crate::status::Status::Pass)
        );
    }

    #[test]
    fn trivial_families() {
        let an = Analysis::with_defaults(fixtures::triv1());
        let r = rep(&an);
        assert_eq!(r.upsets, vec![UpSet(0)]);
        assert_eq!(r.s_family, vec![UpSet(0)]);
        assert_eq!(r.h_family, vec![UpSet(0)]);
    }

    #[test]
    fn cm_cap() {
        let config = AnalysisConfig {
            cap_cm: 6,
            ..AnalysisConfig::default()
        };
        let an = Analysis::new(fixtures::bg8(), config);
        let err = an.representation().as_ref().unwrap_err();
        assert_eq!(err.code(), "cm-too-large");
    }

    #[test]
    fn upsets_match_brute_force() {
        for alg in [
            fixtures::bg8(),
            fixtures::hilb3(),
            fixtures::z4(),
            fixtures::lat2(),
        ] {
            let an = Analysis::with_defaults(alg);
            let p = CmPoset::new(an.lattice());
            let brute: Vec<UpSet> = (0..1u64 << p.len())
                .map(UpSet)
                .filter(|&s| p.is_upset(s))
                .collect();
            let mut got = p.upsets();
            got.sort();
            assert_eq!(got, brute);
        }
    }
}
