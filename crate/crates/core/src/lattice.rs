//! Congruence lattices: principal congruences, the full lattice with covers,
//! meet-irreducible elements and prime-interval projectivity.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{fill_args, FiniteAlgebra};
use crate::partition::{Congruence, UnionFind};

/// Least congruence containing all the given pairs.
///
/// Every merge performed by the union-find is recorded as an edge; images of
/// these edges under single-position substitutions are merged in turn. Since
/// every related pair is connected by a chain of recorded edges, closing the
/// edges alone reaches the fixpoint.
pub fn congruence_generated_by(
    alg: &FiniteAlgebra,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    for (a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    let mut args = Vec::new();
    while let Some((x, y)) = work.pop() {
        for (oi, op) in alg.operations().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let count = n.pow(op.arity as u32 - 1);
            for pos in 0..op.arity {
                for code in 0..count {
                    fill_args(&mut args, op.arity, pos, code, n);
                    args[pos] = x;
                    let u = alg.apply(oi, &args);
                    args[pos] = y;
                    let v = alg.apply(oi, &args);
                    if uf.union(u, v) {
                        work.push((u, v));
                    }
                }
            }
        }
    }
    uf.into_congruence()
}

/// The principal congruence Θ(a, b).
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Congruence {
    congruence_generated_by(alg, [(a, b)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeInterval {
    pub lower: usize,
    pub upper: usize,
}

/// All congruences of an algebra, indexed so that Δ is first, ∇ is last and
/// the index order extends inclusion.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    size: usize,
    elems: Vec<Congruence>,
    index: HashMap<Congruence, usize>,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    principal: Vec<usize>,
    cm: Vec<usize>,
    plus: Vec<Option<usize>>,
}

impl CongruenceLattice {
    pub fn new(alg: &FiniteAlgebra) -> Self {
        let n = alg.size();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        let principals: Vec<Congruence> = pairs
            .par_iter()
            .map(|&(a, b)| principal_congruence(alg, a, b))
            .collect();

        let mut distinct: Vec<Congruence> = principals.clone();
        distinct.sort();
        distinct.dedup();

        // Every congruence is a join of principal ones.
        let mut elems: Vec<Congruence> = vec![Congruence::identity(n)];
        let mut seen: HashMap<Congruence, ()> = HashMap::new();
        seen.insert(elems[0].clone(), ());
        let mut i = 0;
        while i < elems.len() {
            let current = elems[i].clone();
            for p in &distinct {
                let j = current.join(p);
                if !seen.contains_key(&j) {
                    seen.insert(j.clone(), ());
                    elems.push(j);
                }
            }
            i += 1;
        }
        elems.sort_by(|a, b| {
            b.num_blocks()
                .cmp(&a.num_blocks())
                .then_with(|| a.reps().cmp(b.reps()))
        });
        let index: HashMap<Congruence, usize> = elems
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();

        let m = elems.len();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            for j in i..m {
                leq[i * m + j] = elems[i].leq(&elems[j]);
            }
        }
        let rows: Vec<(Vec<usize>, Vec<usize>)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut mr = Vec::with_capacity(m);
                let mut jr = Vec::with_capacity(m);
                for j in 0..m {
                    mr.push(index[&elems[i].meet(&elems[j])]);
                    jr.push(index[&elems[i].join(&elems[j])]);
                }
                (mr, jr)
            })
            .collect();
        let mut meet = Vec::with_capacity(m * m);
        let mut join = Vec::with_capacity(m * m);
        for (mr, jr) in rows {
            meet.extend(mr);
            join.extend(jr);
        }

        let mut upper_covers = vec![Vec::new(); m];
        let mut lower_covers = vec![Vec::new(); m];
        for i in 0..m {
            for j in i + 1..m {
                if !leq[i * m + j] {
                    continue;
                }
                let between = (i + 1..j).any(|k| leq[i * m + k] && leq[k * m + j]);
                if !between {
                    upper_covers[i].push(j);
                    lower_covers[j].push(i);
                }
            }
        }
        let mut cm = Vec::new();
        let mut plus = vec![None; m];
        for i in 0..m {
            if upper_covers[i].len() == 1 {
                cm.push(i);
                plus[i] = Some(upper_covers[i][0]);
            }
        }

        let mut principal = vec![0; n * n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let idx = index[&principals[k]];
            principal[a * n + b] = idx;
            principal[b * n + a] = idx;
        }

        CongruenceLattice {
            size: n,
            elems,
            index,
            leq,
            meet,
            join,
            upper_covers,
            lower_covers,
            principal,
            cm,
            plus,
        }
    }

    /// Size of the underlying universe.
    pub fn universe_size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elems.len() - 1
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.elems[i]
    }

    pub fn elements(&self) -> &[Congruence] {
        &self.elems
    }

    pub fn index_of(&self, c: &Congruence) -> Option<usize> {
        self.index.get(c).copied()
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.elems.len() + j]
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    #[inline]
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.elems.len() + j]
    }

    #[inline]
    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.elems.len() + j]
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items
            .into_iter()
            .fold(self.top(), |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items
            .into_iter()
            .fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper_covers[i]
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.lower_covers[i]
    }

    pub fn covers(&self, lower: usize, upper: usize) -> bool {
        self.upper_covers[lower].contains(&upper)
    }

    /// Index of Θ(a, b).
    pub fn principal(&self, a: usize, b: usize) -> usize {
        if a == b {
            0
        } else {
            self.principal[a * self.size + b]
        }
    }

    /// Meet-irreducible congruences in index order.
    pub fn cm(&self) -> &[usize] {
        &self.cm
    }

    pub fn is_cm(&self, i: usize) -> bool {
        self.plus[i].is_some()
    }

    /// The unique cover of a meet-irreducible congruence.
    pub fn plus(&self, i: usize) -> Option<usize> {
        self.plus[i]
    }

    /// Pairs `(η, η⁺)`.
    pub fn meet_irreducibles(&self) -> Vec<(usize, usize)> {
        self.cm
            .iter()
            .map(|&i| (i, self.plus[i].unwrap()))
            .collect()
    }

    /// `{μ ∈ Cm : φ ≤ μ}`.
    pub fn cm_above(&self, phi: usize) -> Vec<usize> {
        self.cm
            .iter()
            .copied()
            .filter(|&mu| self.leq(phi, mu))
            .collect()
    }

    /// First congruence that is not the meet of the meet-irreducibles above it.
    pub fn birkhoff_failure(&self) -> Option<usize> {
        (0..self.len()).find(|&phi| self.meet_all(self.cm_above(phi)) != phi)
    }

    /// Witness `(x, y, z)` with `x ≤ z` and `x ∨ (y ∧ z) ≠ (x ∨ y) ∧ z`.
    pub fn modularity_witness(&self) -> Option<(usize, usize, usize)> {
        let m = self.len();
        (0..m).into_par_iter().find_map_first(|x| {
            for z in x..m {
                if !self.leq(x, z) {
                    continue;
                }
                for y in 0..m {
                    if self.join(x, self.meet(y, z)) != self.meet(self.join(x, y), z) {
                        return Some((x, y, z));
                    }
                }
            }
            None
        })
    }

    /// Witness `(x, y, z)` with `x ∧ (y ∨ z) ≠ (x ∧ y) ∨ (x ∧ z)`.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        let m = self.len();
        (0..m).into_par_iter().find_map_first(|x| {
            for y in 0..m {
                for z in 0..m {
                    if self.meet(x, self.join(y, z)) != self.join(self.meet(x, y), self.meet(x, z))
                    {
                        return Some((x, y, z));
                    }
                }
            }
            None
        })
    }

    pub fn is_modular(&self) -> bool {
        self.modularity_witness().is_none()
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// Length of the longest chain, as a longest path in the cover graph.
    pub fn length(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        for i in 0..self.len() {
            for &j in &self.upper_covers[i] {
                depth[j] = depth[j].max(depth[i] + 1);
            }
        }
        depth[self.top()]
    }

    /// Length of the chain obtained by always stepping to the first cover.
    pub fn greedy_chain_length(&self) -> usize {
        let mut i = self.bottom();
        let mut steps = 0;
        while let Some(&j) = self.upper_covers[i].first() {
            i = j;
            steps += 1;
        }
        steps
    }

    pub fn prime_intervals(&self) -> Vec<PrimeInterval> {
        let mut out = Vec::new();
        for lower in 0..self.len() {
            for &upper in &self.upper_covers[lower] {
                out.push(PrimeInterval { lower, upper });
            }
        }
        out
    }

    /// `I₁ ↗ I₂`: `lower₁ = upper₁ ∧ lower₂` and `upper₂ = upper₁ ∨ lower₂`.
    pub fn transposes_up(&self, i1: PrimeInterval, i2: PrimeInterval) -> bool {
        i1.lower == self.meet(i1.upper, i2.lower) && i2.upper == self.join(i1.upper, i2.lower)
    }

    pub fn transposes_down(&self, i1: PrimeInterval, i2: PrimeInterval) -> bool {
        self.transposes_up(i2, i1)
    }

    pub fn projectivity(&self) -> Projectivity {
        Projectivity::new(self)
    }
}

/// Connected components of the transposition graph on all prime intervals.
#[derive(Debug, Clone)]
pub struct Projectivity {
    intervals: Vec<PrimeInterval>,
    position: HashMap<PrimeInterval, usize>,
    component: Vec<usize>,
}

impl Projectivity {
    pub fn new(lat: &CongruenceLattice) -> Self {
        let intervals = lat.prime_intervals();
        let position: HashMap<PrimeInterval, usize> = intervals
            .iter()
            .enumerate()
            .map(|(i, &iv)| (iv, i))
            .collect();
        let mut uf = UnionFind::new(intervals.len());
        // For I = [a, b] every upward transposition partner [c, b ∨ c] has
        // b ∧ c = a; scanning c covers all of them.
        for (i, iv) in intervals.iter().enumerate() {
            for c in 0..lat.len() {
                if lat.meet(iv.upper, c) != iv.lower {
                    continue;
                }
                let d = lat.join(iv.upper, c);
                if let Some(&j) = position.get(&PrimeInterval { lower: c, upper: d }) {
                    uf.union(i, j);
                }
            }
        }
        let component = (0..intervals.len()).map(|i| uf.find(i)).collect();
        Projectivity {
            intervals,
            position,
            component,
        }
    }

    pub fn intervals(&self) -> &[PrimeInterval] {
        &self.intervals
    }

    pub fn component_of(&self, iv: PrimeInterval) -> Option<usize> {
        self.position.get(&iv).map(|&i| self.component[i])
    }

    pub fn projective(&self, a: PrimeInterval, b: PrimeInterval) -> bool {
        match (self.component_of(a), self.component_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn cg(n: usize, blocks: &[Vec<usize>]) -> Congruence {
        Congruence::from_blocks(n, blocks)
    }

    #[test]
    fn principal_examples() {
        let h = fixtures::hilb3();
        assert!(principal_congruence(&h, 1, 1).is_identity());
        assert_eq!(
            principal_congruence(&h, 0, 1),
            cg(3, &[vec![0, 1], vec![2]])
        );
        assert!(principal_congruence(&h, 1, 2).is_total());
        let b = fixtures::bg4();
        assert_eq!(
            principal_congruence(&b, 0, 1),
            cg(4, &[vec![0, 1], vec![2, 3]])
        );
    }

    #[test]
    fn hilb3_lattice() {
        let l = CongruenceLattice::new(&fixtures::hilb3());
        assert_eq!(l.len(), 4);
        assert!(l.is_distributive());
        let alpha = l.index_of(&cg(3, &[vec![0, 1], vec![2]])).unwrap();
        let beta = l.index_of(&cg(3, &[vec![0, 2], vec![1]])).unwrap();
        assert_eq!(l.cm(), &[alpha, beta]);
        assert_eq!(l.plus(alpha), Some(l.top()));
        assert_eq!(l.plus(beta), Some(l.top()));
        assert_eq!(l.meet(alpha, beta), l.bottom());
        assert_eq!(l.join(alpha, beta), l.top());
        let up = PrimeInterval {
            lower: 0,
            upper: beta,
        };
        let target = PrimeInterval {
            lower: alpha,
            upper: l.top(),
        };
        assert!(l.transposes_up(up, target));
        assert!(l.transposes_up(up, up));
        let p = l.projectivity();
        let other = PrimeInterval {
            lower: beta,
            upper: l.top(),
        };
        assert!(!p.projective(target, other));
        assert!(p.projective(target, target));
        assert_eq!(l.length(), 2);
    }

    #[test]
    fn trivial_lattice() {
        let l = CongruenceLattice::new(&fixtures::triv1());
        assert_eq!(l.len(), 1);
        assert!(l.cm().is_empty());
        assert!(l.is_modular() && l.is_distributive());
        assert_eq!(l.length(), 0);
        assert_eq!(l.birkhoff_failure(), None);
    }

    #[test]
    fn bg4_is_m3() {
        let l = CongruenceLattice::new(&fixtures::bg4());
        assert_eq!(l.len(), 5);
        assert_eq!(l.cm(), &[1, 2, 3]);
        for a in 1..4 {
            assert_eq!(l.plus(a), Some(4));
        }
        assert!(l.is_modular());
        assert_eq!(l.distributivity_witness(), Some((1, 2, 3)));
        assert_eq!(l.join(1, 2), 4);
        let p = l.projectivity();
        let top = |a| PrimeInterval { lower: a, upper: 4 };
        assert!(p.projective(top(1), top(2)));
        assert!(l.transposes_up(PrimeInterval { lower: 0, upper: 1 }, top(2)));
    }

    #[test]
    fn bg8_lattice() {
        let l = CongruenceLattice::new(&fixtures::bg8());
        assert_eq!(l.len(), 16);
        assert_eq!(l.cm().len(), 7);
        assert_eq!(l.length(), 3);
        assert!(l.is_modular());
    }

    #[test]
    fn z4_chain() {
        let l = CongruenceLattice::new(&fixtures::z4());
        assert_eq!(l.len(), 3);
        assert_eq!(l.cm(), &[0, 1]);
        assert!(l.is_distributive());
    }

    /// Oracle: all compatible partitions by brute force over set partitions.
    fn all_partitions(n: usize) -> Vec<Congruence> {
        let mut out = Vec::new();
        let mut labels = vec![0usize; n];
        fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Congruence>) {
            if i == labels.len() {
                out.push(Congruence::from_labels(labels));
                return;
            }
            for l in 0..=max {
                labels[i] = l;
                rec(i + 1, max.max(l + 1), labels, out);
            }
        }
        if n > 0 {
            rec(1, 1, &mut labels, &mut out);
        }
        out
    }

    fn groupoid(n: usize) -> impl Strategy<Value = FiniteAlgebra> {
        (
            proptest::collection::vec(0..n, n * n),
            proptest::collection::vec(0..n, n),
        )
            .prop_map(move |(t, u)| {
                FiniteAlgebra::new("g", n, 0, vec![("*", 2, t), ("u", 1, u)]).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lattice_matches_brute_force(alg in groupoid(4)) {
            let l = CongruenceLattice::new(&alg);
            let mut expected: Vec<Congruence> = all_partitions(4)
                .into_iter()
                .filter(|p| alg.is_compatible(p))
                .collect();
            expected.sort();
            let mut got = l.elements().to_vec();
            got.sort();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn lattice_invariants(alg in groupoid(4)) {
            let l = CongruenceLattice::new(&alg);
            prop_assert!(l.get(0).is_identity());
            prop_assert!(l.get(l.top()).is_total());
            prop_assert_eq!(l.birkhoff_failure(), None);
            for &eta in l.cm() {
                let p = l.plus(eta).unwrap();
                for g in 0..l.len() {
                    if l.lt(eta, g) {
                        prop_assert!(l.leq(p, g));
                    }
                }
            }
            for a in 0..4 {
                for b in 0..4 {
                    let t = l.principal(a, b);
                    prop_assert!(l.get(t).related(a, b));
                    for c in 0..l.len() {
                        if l.get(c).related(a, b) {
                            prop_assert!(l.leq(t, c));
                        }
                    }
                }
            }
        }

        #[test]
        fn projectivity_is_symmetric_closure(alg in groupoid(4)) {
            let l = CongruenceLattice::new(&alg);
            let p = l.projectivity();
            let ivs = l.prime_intervals();
            for &a in &ivs {
                for &b in &ivs {
                    if l.transposes_up(a, b) || l.transposes_down(a, b) {
                        prop_assert!(p.projective(a, b));
                    }
                }
            }
        }
    }
}
