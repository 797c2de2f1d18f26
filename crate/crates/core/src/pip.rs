//! Classes of meet-irreducible congruences whose prime intervals are
//! projective, the Boolean groups they carry under •, and the structural
//! checks built on them.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::commutator::{CommutatorEngine, CommutatorError};
use crate::lattice::{CongruenceLattice, PrimeInterval, Projectivity};
use crate::partition::{Relation, UnionFind};
use crate::status::{Clause, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum PipError {
    #[error("plus-mismatch: {phi} and {psi} have different unique covers")]
    PlusMismatch { phi: usize, psi: usize },
    #[error("requires-sc1: the bullet test for classes needs the centralizer condition")]
    RequiresSc1,
    #[error("not-a-group: {reason} at {witness:?}")]
    NotAGroup { reason: String, witness: Vec<usize> },
    #[error("no-split-found: no pair in the class of {eta} separates {alpha} and {beta}")]
    NoSplitFound {
        eta: usize,
        alpha: usize,
        beta: usize,
    },
    #[error("no-decomposition: {0}")]
    NoDecomposition(String),
}

impl PipError {
    pub fn code(&self) -> &'static str {
        match self {
            PipError::PlusMismatch { .. } => "plus-mismatch",
            PipError::RequiresSc1 => "requires-sc1",
            PipError::NotAGroup { .. } => "not-a-group",
            PipError::NoSplitFound { .. } => "no-split-found",
            PipError::NoDecomposition(_) => "no-decomposition",
        }
    }
}

/// `φ • ψ` computed inside a fixed upper congruence.
#[derive(Debug, Clone)]
pub struct Bullet {
    pub relation: Relation,
    /// Lattice index when the relation is a congruence.
    pub congruence: Option<usize>,
}

impl Bullet {
    pub fn is_congruence(&self) -> bool {
        self.congruence.is_some()
    }
}

/// `{(x, y) ∈ plus : (x, y) ∈ φ ⇔ (x, y) ∈ ψ}`.
pub fn bullet_within(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    plus: usize,
    phi: usize,
    psi: usize,
) -> Bullet {
    let n = alg.size();
    let (p, f, g) = (lat.get(plus), lat.get(phi), lat.get(psi));
    let mut relation = Relation::empty(n);
    for x in 0..n {
        for y in 0..n {
            if p.related(x, y) && f.related(x, y) == g.related(x, y) {
                relation.insert(x, y);
            }
        }
    }
    let congruence = relation
        .to_congruence()
        .filter(|c| alg.is_compatible(c))
        .map(|c| {
            lat.index_of(&c)
                .expect("compatible partition is in the lattice")
        });
    Bullet {
        relation,
        congruence,
    }
}

/// `φ • ψ` for meet-irreducible φ, ψ with the same unique cover.
pub fn bullet(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    phi: usize,
    psi: usize,
) -> Result<Bullet, PipError> {
    match (lat.plus(phi), lat.plus(psi)) {
        (Some(a), Some(b)) if a == b => Ok(bullet_within(alg, lat, a, phi, psi)),
        _ => Err(PipError::PlusMismatch { phi, psi }),
    }
}

fn classes_from(cm: &[usize], same: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(cm.len());
    for i in 0..cm.len() {
        for j in i + 1..cm.len() {
            if same(cm[i], cm[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, &eta) in cm.iter().enumerate() {
        let r = uf.find(i);
        let k = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(eta);
    }
    groups
}

/// Classes of Cm under projectivity of `I[η, η⁺]`, by graph connectivity
/// over all prime intervals.
pub fn pip_classes_projective(lat: &CongruenceLattice, proj: &Projectivity) -> Vec<Vec<usize>> {
    let iv = |e: usize| PrimeInterval {
        lower: e,
        upper: lat.plus(e).unwrap(),
    };
    classes_from(lat.cm(), |a, b| proj.projective(iv(a), iv(b)))
}

/// Classes of Cm via the bullet test: φ ∼ ψ when they share a cover and
/// `φ • ψ` is a congruence.
pub fn pip_classes_fast(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    sc1_holds: bool,
) -> Result<Vec<Vec<usize>>, PipError> {
    if !sc1_holds {
        return Err(PipError::RequiresSc1);
    }
    Ok(classes_from(lat.cm(), |a, b| {
        lat.plus(a) == lat.plus(b)
            && bullet_within(alg, lat, lat.plus(a).unwrap(), a, b).is_congruence()
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipClass {
    pub members: Vec<usize>,
    /// Common unique cover, or the cover of the first member if they differ.
    pub plus: usize,
    /// Meet of the members.
    pub zero: usize,
    pub shared_plus: bool,
}

impl PipClass {
    pub fn new(lat: &CongruenceLattice, members: Vec<usize>) -> Self {
        let plus = lat.plus(members[0]).expect("meet-irreducible");
        let shared_plus = members.iter().all(|&m| lat.plus(m) == Some(plus));
        let zero = lat.meet_all(members.iter().copied());
        PipClass {
            members,
            plus,
            zero,
            shared_plus,
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }
}

/// `(Ū, •)` with the cover as element 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanGroup {
    /// Lattice indices; `elements[0]` is the identity.
    pub elements: Vec<usize>,
    /// `table[i * k + j]` is the position of `elements[i] • elements[j]`.
    pub table: Vec<usize>,
    pub dim: u32,
}

impl BooleanGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, lattice_index: usize) -> Option<usize> {
        self.elements.iter().position(|&e| e == lattice_index)
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.table[i * self.elements.len() + j]
    }

    /// Whether the marked positions form a subgroup.
    pub fn is_subgroup(&self, marked: &[bool]) -> bool {
        let k = self.order();
        marked[0]
            && (0..k)
                .all(|i| !marked[i] || (0..k).all(|j| !marked[j] || marked[self.product(i, j)]))
    }

    pub fn is_hyperplane(&self, marked: &[bool]) -> bool {
        self.is_subgroup(marked) && 2 * marked.iter().filter(|&&b| b).count() == self.order()
    }
}

/// Build and validate the Cayley table of `(Ū, •)`.
pub fn boolean_group(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    class: &PipClass,
) -> Result<BooleanGroup, PipError> {
    if !class.shared_plus {
        let other = class
            .members
            .iter()
            .copied()
            .find(|&m| lat.plus(m) != Some(class.plus))
            .unwrap();
        return Err(PipError::PlusMismatch {
            phi: class.members[0],
            psi: other,
        });
    }
    let mut elements = vec![class.plus];
    elements.extend(class.members.iter().copied());
    let k = elements.len();
    let mut table = vec![0; k * k];
    for i in 0..k {
        for j in 0..k {
            let b = bullet_within(alg, lat, class.plus, elements[i], elements[j]);
            let pos = b
                .congruence
                .and_then(|c| elements.iter().position(|&e| e == c))
                .ok_or_else(|| PipError::NotAGroup {
                    reason: "product leaves the class".into(),
                    witness: vec![elements[i], elements[j]],
                })?;
            table[i * k + j] = pos;
        }
    }
    let group = BooleanGroup {
        elements,
        table,
        dim: 0,
    };
    for i in 0..k {
        if group.product(0, i) != i || group.product(i, 0) != i {
            return Err(PipError::NotAGroup {
                reason: "cover is not an identity".into(),
                witness: vec![group.elements[i]],
            });
        }
        if group.product(i, i) != 0 {
            return Err(PipError::NotAGroup {
                reason: "element is not self-inverse".into(),
                witness: vec![group.elements[i]],
            });
        }
        for j in 0..k {
            for l in 0..k {
                if group.product(group.product(i, j), l) != group.product(i, group.product(j, l)) {
                    return Err(PipError::NotAGroup {
                        reason: "not associative".into(),
                        witness: vec![group.elements[i], group.elements[j], group.elements[l]],
                    });
                }
            }
        }
    }
    if !k.is_power_of_two() {
        return Err(PipError::NotAGroup {
            reason: format!("order {k} is not a power of two"),
            witness: group.elements.clone(),
        });
    }
    Ok(BooleanGroup {
        dim: k.trailing_zeros(),
        ..group
    })
}

/// PIP classes of an algebra, ordered by least member.
#[derive(Debug, Clone)]
pub struct PipStructure {
    pub classes: Vec<PipClass>,
    class_of: HashMap<usize, usize>,
}

impl PipStructure {
    pub fn new(lat: &CongruenceLattice, classes: Vec<Vec<usize>>) -> Self {
        let classes: Vec<PipClass> = classes.into_iter().map(|m| PipClass::new(lat, m)).collect();
        let mut class_of = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            for &m in &c.members {
                class_of.insert(m, i);
            }
        }
        PipStructure { classes, class_of }
    }

    pub fn class_of(&self, eta: usize) -> Option<&PipClass> {
        self.class_of.get(&eta).map(|&i| &self.classes[i])
    }

    pub fn class_index(&self, eta: usize) -> Option<usize> {
        self.class_of.get(&eta).copied()
    }

    pub fn all_singletons(&self) -> bool {
        self.classes.iter().all(|c| c.members.len() == 1)
    }
}

/// Find μ₁ ≥ α and μ₂ ≥ β in the class of η together with ∇, such that
/// μ₁ ∧ μ₂ ≤ η.
pub fn split_pair(
    lat: &CongruenceLattice,
    class: &PipClass,
    eta: usize,
    alpha: usize,
    beta: usize,
) -> Result<(usize, usize), PipError> {
    let others: Vec<usize> = class
        .members
        .iter()
        .copied()
        .filter(|&m| m != eta)
        .collect();
    let top = lat.top();
    let mut first = vec![eta];
    first.extend(&others);
    first.push(top);
    let mut second = vec![top, eta];
    second.extend(&others);
    for &m1 in &first {
        if !lat.leq(alpha, m1) {
            continue;
        }
        for &m2 in &second {
            if lat.leq(beta, m2) && lat.leq(lat.meet(m1, m2), eta) {
                return Ok((m1, m2));
            }
        }
    }
    Err(PipError::NoSplitFound { eta, alpha, beta })
}

/// `•`-product of class members, all sharing the cover `plus`.
pub fn bullet_product(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    plus: usize,
    items: &[usize],
) -> Option<usize> {
    let mut acc = plus;
    for &x in items {
        acc = bullet_within(alg, lat, plus, acc, x).congruence?;
    }
    Some(acc)
}

/// Given `⋀ alphas ≤ η`, choose `μᵢ ≥ αᵢ` from the class of η together with
/// ∇ so that `⋀ μᵢ ≤ η` and η is the •-product of the μᵢ over the returned
/// (0-based, non-empty) subset.
pub fn decompose_meet(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    pip: &PipStructure,
    eta: usize,
    alphas: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), PipError> {
    let class = pip
        .class_of(eta)
        .ok_or_else(|| PipError::NoDecomposition(format!("{eta} is not meet-irreducible")))?;
    if alphas.is_empty() || !lat.leq(lat.meet_all(alphas.iter().copied()), eta) {
        return Err(PipError::NoDecomposition(
            "the meet of the arguments is not below the target".into(),
        ));
    }
    let (mus, subset) = decompose_rec(lat, pip, eta, alphas)?;
    let chosen: Vec<usize> = subset.iter().map(|&i| mus[i]).collect();
    let ok = alphas.iter().zip(&mus).all(|(&a, &m)| lat.leq(a, m))
        && mus.iter().all(|&m| m == lat.top() || class.contains(m))
        && lat.leq(lat.meet_all(mus.iter().copied()), eta)
        && bullet_product(alg, lat, class.plus, &chosen) == Some(eta);
    if !ok {
        return Err(PipError::NoDecomposition(format!(
            "result {mus:?} over {subset:?} does not multiply to {eta}"
        )));
    }
    Ok((mus, subset))
}

fn decompose_rec(
    lat: &CongruenceLattice,
    pip: &PipStructure,
    eta: usize,
    alphas: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), PipError> {
    let top = lat.top();
    let n = alphas.len();
    if n == 1 {
        return Ok((vec![eta], vec![0]));
    }
    if let Some(i) = alphas.iter().position(|&a| lat.leq(a, eta)) {
        let mut mus = vec![top; n];
        mus[i] = eta;
        return Ok((mus, vec![i]));
    }
    let class = pip.class_of(eta).expect("meet-irreducible");
    let head = lat.meet_all(alphas[..n - 1].iter().copied());
    let (u1, u2) = split_pair(lat, class, eta, head, alphas[n - 1])?;
    if u1 == top || u1 == u2 || u2 == eta {
        return Err(PipError::NoDecomposition(format!(
            "degenerate split ({u1}, {u2}) for {eta}"
        )));
    }
    let (mut mus, mut subset) = decompose_rec(lat, pip, u1, &alphas[..n - 1])?;
    if u1 == eta {
        mus.push(top);
    } else {
        mus.push(u2);
        subset.push(n - 1);
    }
    Ok((mus, subset))
}

/// First `(ν₁, ν₂, η)` of distinct class members where `ν₁ • ν₂ = η` and
/// `ν₁ ∧ ν₂ ≤ η` disagree.
pub fn triple_law_witness(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    class: &PipClass,
) -> Option<Vec<usize>> {
    let m = &class.members;
    for &a in m {
        for &b in m {
            for &e in m {
                if a == b || b == e || a == e {
                    continue;
                }
                let prod = bullet_within(alg, lat, class.plus, a, b).congruence == Some(e);
                if prod != lat.leq(lat.meet(a, b), e) {
                    return Some(vec![a, b, e]);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassLocation {
    pub members: Vec<usize>,
    pub zero: usize,
    pub plus: usize,
    /// Class equals `{β : 0_U ≤ β ≺ μ⁺}`.
    pub covers_above_zero: Clause,
    /// Class equals `Cm ∩ [0_U, μ⁺)`.
    pub cm_in_interval: Clause,
    /// Every congruence above `0_U` is comparable with `μ⁺`.
    pub comparable_with_plus: Clause,
    /// For `(1, a) ∈ μ⁺ ∖ 0_U`, `Θ(1, a) ∨ 0_U` covers `0_U`; witness is `a`.
    pub atoms_from_one: Clause,
    /// `[α, α] ≤ 0_U` implies `α ≤ μ⁺`; witness is α.
    pub abelian_implies_below: Clause,
    /// When μ⁺ is abelian over μ: `[α, α] ≤ 0_U` iff `α ≤ μ⁺`.
    pub abelian_iff_below: Clause,
}

impl ClassLocation {
    pub fn status(&self) -> Status {
        [
            &self.covers_above_zero,
            &self.cm_in_interval,
            &self.comparable_with_plus,
            &self.atoms_from_one,
            &self.abelian_implies_below,
            &self.abelian_iff_below,
        ]
        .iter()
        .fold(Status::Pass, |s, c| s.and(c.status))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocationReport {
    pub classes: Vec<ClassLocation>,
}

impl LocationReport {
    pub fn status(&self) -> Status {
        self.classes
            .iter()
            .fold(Status::Pass, |s, c| s.and(c.status()))
    }
}

fn set_diff(expected: &[usize], got: &[usize]) -> Option<Vec<usize>> {
    let mut a = expected.to_vec();
    let mut b = got.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a == b {
        None
    } else {
        let mut w: Vec<usize> = a.iter().filter(|x| !b.contains(x)).copied().collect();
        w.extend(b.iter().filter(|x| !a.contains(x)));
        Some(w)
    }
}

/// Check where each class sits in the lattice. Never fails; commutator caps
/// turn the affected clauses into `unknown`.
pub fn verify_location(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
    pip: &PipStructure,
    engine: &CommutatorEngine,
) -> LocationReport {
    let one = alg.one();
    let classes = pip
        .classes
        .iter()
        .map(|class| {
            let (zero, plus) = (class.zero, class.plus);
            let covered: Vec<usize> = lat
                .lower_covers(plus)
                .iter()
                .copied()
                .filter(|&b| lat.leq(zero, b))
                .collect();
            let in_interval: Vec<usize> = lat
                .cm()
                .iter()
                .copied()
                .filter(|&g| lat.leq(zero, g) && lat.lt(g, plus))
                .collect();
            let incomparable = (0..lat.len())
                .find(|&a| lat.leq(zero, a) && !lat.leq(a, plus) && !lat.leq(plus, a));
            let bad_atom = (0..alg.size()).find(|&a| {
                let (p, z) = (lat.get(plus), lat.get(zero));
                if !p.related(one, a) || z.related(one, a) {
                    return false;
                }
                let g = lat.join(lat.principal(one, a), zero);
                !lat.covers(zero, g)
            });
            let (implies, iff) = abelian_clauses(lat, engine, class);
            ClassLocation {
                members: class.members.clone(),
                zero,
                plus,
                covers_above_zero: Clause::from_witness(set_diff(&class.members, &covered)),
                cm_in_interval: Clause::from_witness(set_diff(&class.members, &in_interval)),
                comparable_with_plus: Clause::from_witness(incomparable.map(|a| vec![a])),
                atoms_from_one: Clause::from_witness(bad_atom.map(|a| vec![a])),
                abelian_implies_below: implies,
                abelian_iff_below: iff,
            }
        })
        .collect();
    LocationReport { classes }
}

fn abelian_clauses(
    lat: &CongruenceLattice,
    engine: &CommutatorEngine,
    class: &PipClass,
) -> (Clause, Clause) {
    let run = || -> Result<(Clause, Clause), CommutatorError> {
        let (zero, plus) = (class.zero, class.plus);
        let mut implies = None;
        let mut iff = None;
        let abelian = engine.is_abelian_over(plus, class.members[0])?.abelian;
        for a in 0..lat.len() {
            let small = lat.leq(engine.commutator(a, a)?, zero);
            let below = lat.leq(a, plus);
            if small && !below && implies.is_none() {
                implies = Some(vec![a]);
            }
            if small != below && iff.is_none() {
                iff = Some(vec![a]);
            }
        }
        let iff = if abelian {
            Clause::from_witness(iff)
        } else {
            Clause::with_status(Status::NotApplicable)
        };
        Ok((Clause::from_witness(implies), iff))
    };
    run().unwrap_or_else(|_| {
        (
            Clause::with_status(Status::Unknown),
            Clause::with_status(Status::Unknown),
        )
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    /// Longest chain from Δ to ∇.
    pub length: usize,
    /// Chain found by always taking the first cover.
    pub greedy_length: usize,
    pub sum_of_dims: u32,
    pub equal: bool,
}

pub fn dimension_formula(lat: &CongruenceLattice, groups: &[BooleanGroup]) -> DimensionReport {
    let length = lat.length();
    let sum_of_dims: u32 = groups.iter().map(|g| g.dim).sum();
    DimensionReport {
        length,
        greedy_length: lat.greedy_chain_length(),
        sum_of_dims,
        equal: length == sum_of_dims as usize,
    }
}
