//! Equivalence relations on `0..n` in canonical form.

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the classes of `a` and `b`; the smaller root wins.
    /// Returns true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub fn into_congruence(mut self) -> Congruence {
        let n = self.parent.len();
        let rep = (0..n).map(|x| self.find(x)).collect();
        Congruence { rep }
    }
}

/// An equivalence relation on `0..n`, stored as the least element of each
/// element's block. Two partitions are equal iff their `rep` vectors are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    rep: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence {
            rep: (0..n).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence { rep: vec![0; n] }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut uf = UnionFind::new(n);
        for b in blocks {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.into_congruence()
    }

    /// Equivalence generated by the given pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_congruence()
    }

    /// Canonicalise an arbitrary block labelling.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut first = std::collections::HashMap::new();
        let rep = (0..n)
            .map(|x| *first.entry(labels[x]).or_insert(x))
            .collect();
        Congruence { rep }
    }

    pub fn size(&self) -> usize {
        self.rep.len()
    }

    #[inline]
    pub fn rep(&self, x: usize) -> usize {
        self.rep[x]
    }

    pub fn reps(&self) -> &[usize] {
        &self.rep
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn num_blocks(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|(x, &r)| *x == r)
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.iter().enumerate().all(|(x, &r)| x == r)
    }

    pub fn is_total(&self) -> bool {
        self.rep.iter().all(|&r| r == 0)
    }

    /// Blocks ordered by least element, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.rep.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.rep[x];
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }

    pub fn block_of(&self, x: usize) -> Vec<usize> {
        let r = self.rep[x];
        (0..self.rep.len()).filter(|&y| self.rep[y] == r).collect()
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        self.rep
            .iter()
            .enumerate()
            .all(|(x, &r)| other.rep[x] == other.rep[r])
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let labels: Vec<usize> = (0..self.rep.len())
            .map(|x| self.rep[x] * self.rep.len() + other.rep[x])
            .collect();
        Congruence::from_labels(&labels)
    }

    /// Join as equivalence relations. For congruences of an algebra this is
    /// the lattice join as well.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.rep.len());
        for x in 0..self.rep.len() {
            uf.union(x, self.rep[x]);
            uf.union(x, other.rep[x]);
        }
        uf.into_congruence()
    }

    /// All ordered pairs `(x, y)` with `x ≠ y` in the relation.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.rep.len();
        (0..n).flat_map(move |x| {
            (0..n)
                .filter(move |&y| y != x && self.rep[x] == self.rep[y])
                .map(move |y| (x, y))
        })
    }
}

impl fmt::Display for Congruence {
    /// Blocks separated by `|`, elements by `,`; e.g. `0,1|2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl Serialize for Congruence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

/// A binary relation on `0..n` as a dense bit matrix. Used for relations that
/// need not be equivalences, such as the bullet product of two congruences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn from_congruence(c: &Congruence) -> Self {
        let n = c.size();
        let mut r = Relation::empty(n);
        for x in 0..n {
            for y in 0..n {
                if c.related(x, y) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.n + b] = true;
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            if !self.contains(x, x) {
                return false;
            }
            for y in 0..n {
                if self.contains(x, y) != self.contains(y, x) {
                    return false;
                }
                if !self.contains(x, y) {
                    continue;
                }
                for z in 0..n {
                    if self.contains(y, z) && !self.contains(x, z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The partition, if this relation is an equivalence.
    pub fn to_congruence(&self) -> Option<Congruence> {
        if !self.is_equivalence() {
            return None;
        }
        let labels: Vec<usize> = (0..self.n)
            .map(|x| (0..self.n).find(|&y| self.contains(x, y)).unwrap())
            .collect();
        Some(Congruence::from_labels(&labels))
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n * n)
            .filter(|&i| self.bits[i])
            .map(|i| (i / n, i % n))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let a = Congruence::from_blocks(4, &[vec![3, 1], vec![2, 0]]);
        assert_eq!(a.reps(), &[0, 1, 0, 1]);
        assert_eq!(a.to_string(), "0,2|1,3");
        assert_eq!(a.num_blocks(), 2);
        assert!(Congruence::identity(3).is_identity());
        assert!(Congruence::total(3).is_total());
        assert_eq!(Congruence::total(1), Congruence::identity(1));
    }

    #[test]
    fn meet_and_join() {
        let a = Congruence::from_blocks(4, &[vec![0, 1]]);
        let b = Congruence::from_blocks(4, &[vec![1, 2]]);
        assert_eq!(a.join(&b).to_string(), "0,1,2|3");
        assert_eq!(a.meet(&b), Congruence::identity(4));
        assert!(a.leq(&a.join(&b)));
        assert!(!a.leq(&b));
    }

    #[test]
    fn relation_round_trip() {
        let a = Congruence::from_blocks(5, &[vec![0, 3], vec![1, 2, 4]]);
        let r = Relation::from_congruence(&a);
        assert_eq!(r.to_congruence(), Some(a));
        let mut bad = Relation::empty(2);
        bad.insert(0, 0);
        bad.insert(1, 1);
        bad.insert(0, 1);
        assert!(bad.to_congruence().is_none());
    }

    fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0..n, n)
    }

    proptest! {
        #[test]
        fn lattice_laws(x in labels(6), y in labels(6), z in labels(6)) {
            let (a, b, c) = (Congruence::from_labels(&x), Congruence::from_labels(&y), Congruence::from_labels(&z));
            prop_assert_eq!(a.meet(&b), b.meet(&a));
            prop_assert_eq!(a.join(&b), b.join(&a));
            prop_assert_eq!(a.meet(&a.join(&b)), a.clone());
            prop_assert_eq!(a.join(&a.meet(&b)), a.clone());
            prop_assert_eq!(a.meet(&b).meet(&c), a.meet(&b.meet(&c)));
            prop_assert_eq!(a.join(&b).join(&c), a.join(&b.join(&c)));
            prop_assert_eq!(a.leq(&b), a.meet(&b) == a);
        }

        #[test]
        fn reps_are_least(x in labels(7)) {
            let a = Congruence::from_labels(&x);
            for (i, &r) in a.reps().iter().enumerate() {
                prop_assert!(r <= i);
                prop_assert_eq!(a.rep(r), r);
                prop_assert_eq!(x[i] == x[r], true);
            }
        }
    }
}
