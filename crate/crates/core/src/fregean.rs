//! Orderability, 1-regularity and related properties of an algebra with
//! respect to its constant 1, the natural order, clone searches for Malcev
//! and principal congruence terms, and the resulting classification.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{generate_until, ElementVector, FiniteAlgebra};
use crate::analysis::Analysis;
use crate::lattice::CongruenceLattice;
use crate::status::Clause;

/// First pair `a < b` with `Θ(1, a) = Θ(1, b)`.
pub fn orderability_witness(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
) -> Option<(usize, usize)> {
    let n = alg.size();
    let one = alg.one();
    let theta: Vec<usize> = (0..n).map(|c| lat.principal(one, c)).collect();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| theta[a] == theta[b])
}

pub fn is_congruence_orderable(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> bool {
    orderability_witness(alg, lat).is_none()
}

/// First pair of distinct congruences with the same block of 1.
pub fn one_regularity_witness(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
) -> Option<(usize, usize)> {
    let one = alg.one();
    let blocks: Vec<Vec<usize>> = lat.elements().iter().map(|c| c.block_of(one)).collect();
    (0..lat.len())
        .flat_map(|a| (a + 1..lat.len()).map(move |b| (a, b)))
        .find(|&(a, b)| blocks[a] == blocks[b])
}

pub fn is_one_regular(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> bool {
    one_regularity_witness(alg, lat).is_none()
}

/// Witness `(φ, a, b)` against: for every meet-irreducible φ and
/// `(a, b) ∈ φ⁺`, one of `(a, b)`, `(1, a)`, `(1, b)` lies in φ.
pub fn altern_witness(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
) -> Option<(usize, usize, usize)> {
    let n = alg.size();
    let one = alg.one();
    for &phi in lat.cm() {
        let f = lat.get(phi);
        let p = lat.get(lat.plus(phi).unwrap());
        for a in 0..n {
            for b in 0..n {
                if p.related(a, b) && !f.related(a, b) && !f.related(one, a) && !f.related(one, b) {
                    return Some((phi, a, b));
                }
            }
        }
    }
    None
}

pub fn h_orderable(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> bool {
    altern_witness(alg, lat).is_none()
}

/// Oracle for [`h_orderable`]: the first congruence whose quotient is not
/// congruence orderable.
pub fn non_orderable_quotient(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> Option<usize> {
    (0..lat.len()).into_par_iter().find_first(|&i| {
        let (q, _) = alg
            .quotient(lat.get(i))
            .expect("lattice element is a congruence");
        let ql = CongruenceLattice::new(&q);
        !is_congruence_orderable(&q, &ql)
    })
}

/// For each meet-irreducible φ: in `A/φ` the monolith `φ⁺/φ` has a two-element
/// class of 1 and singletons elsewhere. Witness is the offending φ⁺-block.
pub fn monolith_shape(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> Vec<(usize, Clause)> {
    let one = alg.one();
    lat.cm()
        .iter()
        .map(|&phi| {
            let f = lat.get(phi);
            let p = lat.get(lat.plus(phi).unwrap());
            let bad = p.blocks().into_iter().find(|block| {
                let mut reps: Vec<usize> = block.iter().map(|&x| f.rep(x)).collect();
                reps.sort_unstable();
                reps.dedup();
                let expected = if block.contains(&one) { 2 } else { 1 };
                reps.len() != expected
            });
            (phi, Clause::from_witness(bad))
        })
        .collect()
}

/// `a ≤ b` iff `Θ(1, a) ⊇ Θ(1, b)`, so that 1 is the top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalOrder {
    size: usize,
    leq: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error, Serialize)]
#[error("not-orderable: Θ(1,{0}) = Θ(1,{1})")]
pub struct NotOrderable(pub usize, pub usize);

impl NaturalOrder {
    pub fn new(alg: &FiniteAlgebra, lat: &CongruenceLattice) -> Result<Self, NotOrderable> {
        if let Some((a, b)) = orderability_witness(alg, lat) {
            return Err(NotOrderable(a, b));
        }
        let n = alg.size();
        let theta: Vec<usize> = (0..n).map(|c| lat.principal(alg.one(), c)).collect();
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = lat.leq(theta[b], theta[a]);
            }
        }
        Ok(NaturalOrder { size: n, leq })
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// Minimal elements of `set`, least index first.
    pub fn minimal(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set
            .iter()
            .copied()
            .filter(|&c| !set.iter().any(|&d| self.lt(d, c)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Maximal elements strictly below `top`.
    pub fn coatoms_below(&self, top: usize) -> Vec<usize> {
        let below: Vec<usize> = (0..self.size).filter(|&c| self.lt(c, top)).collect();
        below
            .iter()
            .copied()
            .filter(|&c| !below.iter().any(|&d| self.lt(c, d)))
            .collect()
    }
}

/// Outcome of a clone search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TermSearch {
    Found {
        term: String,
        table: Vec<u16>,
    },
    None,
    /// The generated clone exceeded the cap before a witness appeared.
    Unknown {
        generated: usize,
    },
    NotSearched,
}

impl TermSearch {
    pub fn is_found(&self) -> bool {
        matches!(self, TermSearch::Found { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            TermSearch::Found { .. } => "found",
            TermSearch::None => "none",
            TermSearch::Unknown { .. } => "unknown",
            TermSearch::NotSearched => "not-searched",
        }
    }
}

/// Search the clone of `k`-ary terms, tracking only their values at the
/// given argument tuples. A found term's full table is rebuilt by evaluation.
fn search(
    alg: &FiniteAlgebra,
    k: usize,
    points: &[Vec<usize>],
    cap: usize,
    names: &[&str],
    accept: impl Fn(&ElementVector) -> bool,
) -> TermSearch {
    let n = alg.size();
    let gens: Vec<ElementVector> = (0..k)
        .map(|var| ElementVector(points.iter().map(|p| p[var] as u16).collect()))
        .collect();
    match generate_until(alg, points.len(), &gens, cap, accept) {
        Ok(c) => match c.found {
            Some(i) => {
                let term = c.universe.term(i);
                let mut args = vec![0usize; k];
                let table = (0..n.pow(k as u32))
                    .map(|mut code| {
                        for slot in args.iter_mut().rev() {
                            *slot = code % n;
                            code /= n;
                        }
                        term.eval(alg, &args) as u16
                    })
                    .collect();
                TermSearch::Found {
                    term: term.render(alg, names),
                    table,
                }
            }
            None => TermSearch::None,
        },
        Err(e) => TermSearch::Unknown { generated: e.count },
    }
}

/// Ternary term `p` with `p(a, b, b) = a = p(b, b, a)`. Only the `2n² - n`
/// argument triples named by the identities are tracked.
pub fn find_malcev_term(alg: &FiniteAlgebra, cap: usize) -> TermSearch {
    let n = alg.size();
    let mut points: Vec<(Vec<usize>, usize)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            points.push((vec![a, b, b], a));
            points.push((vec![b, b, a], a));
        }
    }
    points.sort();
    points.dedup();
    let expected: Vec<u16> = points.iter().map(|(_, v)| *v as u16).collect();
    let args: Vec<Vec<usize>> = points.into_iter().map(|(p, _)| p).collect();
    search(alg, 3, &args, cap, &["x", "y", "z"], |v| v.0 == expected)
}

/// Binary term `e` with `Θ(a, b) = Θ(1, e(a, b))` for all `a, b`.
pub fn find_pc_term(alg: &FiniteAlgebra, lat: &CongruenceLattice, cap: usize) -> TermSearch {
    let n = alg.size();
    let one = alg.one();
    let args: Vec<Vec<usize>> = (0..n * n).map(|i| vec![i / n, i % n]).collect();
    search(alg, 2, &args, cap, &["x", "y"], |v| {
        (0..n).all(|a| (0..n).all(|b| lat.principal(a, b) == lat.principal(one, v.get(a * n + b))))
    })
}

/// Witness `(α, β, a)` where `(1, a) ∈ α ∨ β` but not `(1, a) ∈ α ∘ β`.
pub fn one_permutability_witness(
    alg: &FiniteAlgebra,
    lat: &CongruenceLattice,
) -> Option<(usize, usize, usize)> {
    let n = alg.size();
    let one = alg.one();
    let m = lat.len();
    (0..m).into_par_iter().find_map_first(|x| {
        let a = lat.get(x);
        for y in 0..m {
            let b = lat.get(y);
            let j = lat.get(lat.join(x, y));
            for c in 0..n {
                let in_join = j.related(one, c);
                let in_comp = (0..n).any(|d| a.related(one, d) && b.related(d, c));
                if in_join != in_comp {
                    return Some((x, y, c));
                }
            }
        }
        None
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub orderable: bool,
    pub one_regular: bool,
    pub h_orderable: bool,
    /// How `h_orderable` was settled.
    pub h_orderable_source: String,
    pub h_fregean: bool,
    pub con_modular: bool,
    pub con_distributive: bool,
    pub quotients_modular: bool,
    /// `None` when a centralizer computation was capped.
    pub sc1: Option<bool>,
    /// Commutator symmetric and join-distributive, plus the join identity
    /// when the centralizer condition holds. `None` when capped.
    pub commutator_laws: Option<bool>,
    pub malcev_term: TermSearch,
    pub pc_term: TermSearch,
    pub one_permutable: bool,
    pub strongly_fregean: Verdict,
    pub notes: Vec<String>,
}

/// Combine the sub-analyses into a verdict on being strongly Fregean.
///
/// Modularity of the whole variety is out of reach, so a verified verdict
/// rests on modularity of `Con` for the algebra and all its quotients. A
/// Malcev term certifies the variety outright. Laws that the commutator
/// obeys in every modular variety are used to refute: an asymmetric
/// commutator rules the variety out.
pub fn classify(an: &Analysis) -> Classification {
    let alg = an.algebra();
    let lat = an.lattice();
    let orderable = is_congruence_orderable(alg, lat);
    let one_regular = is_one_regular(alg, lat);
    let one_permutable = one_permutability_witness(alg, lat).is_none();
    let mut notes = Vec::new();

    let (h_orderable, h_orderable_source) = if orderable && one_permutable {
        (true, "orderable-and-1-permutable".to_string())
    } else {
        (h_orderable(alg, lat), "altern-condition".to_string())
    };
    let con_modular = lat.is_modular();
    let con_distributive = lat.is_distributive();
    let quotients_modular = con_modular
        && (0..lat.len()).all(|i| {
            let (q, _) = alg.quotient(lat.get(i)).expect("congruence");
            CongruenceLattice::new(&q).is_modular()
        });
    let sc1 = if con_modular { an.sc1_holds() } else { None };
    let malcev_term = an.malcev().clone();
    let pc_term = an.pc_term().clone();

    let commutator_laws = if con_modular {
        an.engine().laws().ok().map(|l| {
            l.symmetry.is_none()
                && l.join_distributivity.is_none()
                && (sc1 != Some(true) || l.c1_identity.is_none())
        })
    } else {
        None
    };

    let strongly_fregean = if !h_orderable || !one_regular || !con_modular {
        Verdict::Refuted
    } else if sc1 == Some(false) {
        notes.push("refuted: the centralizer condition fails, which every strongly Fregean algebra satisfies".into());
        Verdict::Refuted
    } else if commutator_laws == Some(false) {
        notes.push(
            "refuted: the commutator breaks a law that holds in every congruence modular variety"
                .into(),
        );
        Verdict::Refuted
    } else if quotients_modular && sc1 == Some(true) && commutator_laws == Some(true) {
        if malcev_term.is_found() {
            notes.push("permutable-certified: a Malcev term exists and all quotients are congruence orderable".into());
        } else {
            notes.push(
                "modularity-proxy: Con of the algebra and of every quotient is modular".into(),
            );
        }
        Verdict::Verified
    } else {
        if sc1.is_none() || commutator_laws.is_none() {
            notes.push("commutator computation capped".into());
        }
        Verdict::Unknown
    };

    Classification {
        orderable,
        one_regular,
        h_orderable,
        h_orderable_source,
        h_fregean: h_orderable && one_regular,
        con_modular,
        con_distributive,
        quotients_modular,
        sc1,
        commutator_laws,
        malcev_term,
        pc_term,
        one_permutable,
        strongly_fregean,
        notes,
    }
}
