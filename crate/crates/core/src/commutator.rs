//! Term-condition commutators and centralizers over a congruence lattice.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    generate_dense, generate_subuniverse, CapExceeded, ElementVector, FiniteAlgebra, DENSE_LIMIT,
};
use crate::lattice::CongruenceLattice;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum CommutatorError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("tc-not-meet-closed: the meet of the centralizing congruences for ({alpha}, {beta}) fails the term condition")]
    TcNotMeetClosed { alpha: usize, beta: usize },
    #[error("centralizer-join-failure: the join of the congruences centralizing {beta} modulo {delta} fails the term condition")]
    CentralizerJoinFailure { beta: usize, delta: usize },
}

impl CommutatorError {
    pub fn code(&self) -> &'static str {
        match self {
            CommutatorError::Cap(_) => "cap-exceeded",
            CommutatorError::TcNotMeetClosed { .. } => "tc-not-meet-closed",
            CommutatorError::CentralizerJoinFailure { .. } => "centralizer-join-failure",
        }
    }
}

/// A 2×2 matrix `[[x, y], [z, w]]` stored as `[x, y, z, w]`.
pub type Matrix = [u16; 4];

type Memo<T> = Vec<OnceLock<Result<T, CommutatorError>>>;

/// Computes commutators and centralizers, memoising matrix algebras and
/// commutators per pair of lattice indices. Safe to share across threads.
pub struct CommutatorEngine {
    alg: Arc<FiniteAlgebra>,
    lat: Arc<CongruenceLattice>,
    cap: usize,
    matrices: Memo<Arc<Vec<Matrix>>>,
    commutators: Memo<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianCheck {
    /// `[upper, upper] ≤ lower`.
    pub abelian: bool,
    /// `(lower : upper) ≥ upper`, computed independently.
    pub via_centralizer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sc1Report {
    pub holds: bool,
    /// Meet-irreducible φ whose centralizer `(φ : φ⁺)` is not below φ⁺.
    pub witnesses: Vec<usize>,
}

/// Witnesses against the expected algebraic laws of the commutator. `None`
/// means the law holds for every pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorLaws {
    pub below_meet: Option<(usize, usize)>,
    pub symmetry: Option<(usize, usize)>,
    /// `(a, a', b)` with `a ≤ a'` but `[a, b] ≰ [a', b]`.
    pub monotonicity: Option<(usize, usize, usize)>,
    /// `(a, b, c)` with `[a, b ∨ c] ≠ [a, b] ∨ [a, c]`.
    pub join_distributivity: Option<(usize, usize, usize)>,
    pub c1_identity: Option<(usize, usize)>,
}

impl CommutatorLaws {
    pub fn all_hold(&self) -> bool {
        self.below_meet.is_none()
            && self.symmetry.is_none()
            && self.monotonicity.is_none()
            && self.join_distributivity.is_none()
            && self.c1_identity.is_none()
    }
}

impl CommutatorEngine {
    pub fn new(alg: Arc<FiniteAlgebra>, lat: Arc<CongruenceLattice>, cap: usize) -> Self {
        let m = lat.len();
        CommutatorEngine {
            alg,
            lat,
            cap,
            matrices: (0..m * m).map(|_| OnceLock::new()).collect(),
            commutators: (0..m * m).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn lattice(&self) -> &CongruenceLattice {
        &self.lat
    }

    /// The subalgebra of `A⁴` generated by `(a, a, b, b)` for `(a, b) ∈ α`
    /// and `(c, d, c, d)` for `(c, d) ∈ β`.
    pub fn matrix_algebra(
        &self,
        alpha: usize,
        beta: usize,
    ) -> Result<Arc<Vec<Matrix>>, CommutatorError> {
        let slot = &self.matrices[alpha * self.lat.len() + beta];
        slot.get_or_init(|| self.build_matrices(alpha, beta))
            .clone()
    }

    fn build_matrices(
        &self,
        alpha: usize,
        beta: usize,
    ) -> Result<Arc<Vec<Matrix>>, CommutatorError> {
        let n = self.alg.size();
        let a = self.lat.get(alpha);
        let b = self.lat.get(beta);
        let mut gens = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if a.related(x, y) {
                    gens.push(ElementVector::from(vec![x, x, y, y]));
                }
                if b.related(x, y) {
                    gens.push(ElementVector::from(vec![x, y, x, y]));
                }
            }
        }
        let to_matrix = |v: &ElementVector| [v.0[0], v.0[1], v.0[2], v.0[3]];
        let out = if n.checked_pow(4).is_some_and(|t| t <= DENSE_LIMIT) {
            let d = generate_dense(&self.alg, 4, &gens, self.cap)?;
            (0..d.len()).map(|i| to_matrix(&d.vector(i))).collect()
        } else {
            let s = generate_subuniverse(&self.alg, 4, &gens, self.cap)?;
            s.vectors.iter().map(to_matrix).collect()
        };
        Ok(Arc::new(out))
    }

    /// C(α, β; δ): every matrix with `x δ y` also has `z δ w`.
    pub fn term_condition_holds(
        &self,
        alpha: usize,
        beta: usize,
        delta: usize,
    ) -> Result<bool, CommutatorError> {
        let mats = self.matrix_algebra(alpha, beta)?;
        let d = self.lat.get(delta);
        Ok(mats.iter().all(|m| {
            !d.related(m[0] as usize, m[1] as usize) || d.related(m[2] as usize, m[3] as usize)
        }))
    }

    /// `[α, β]`: the meet of every δ with C(α, β; δ), re-verified.
    pub fn commutator(&self, alpha: usize, beta: usize) -> Result<usize, CommutatorError> {
        let slot = &self.commutators[alpha * self.lat.len() + beta];
        slot.get_or_init(|| {
            let mut acc = self.lat.top();
            for delta in 0..self.lat.len() {
                if self.term_condition_holds(alpha, beta, delta)? {
                    acc = self.lat.meet(acc, delta);
                }
            }
            if !self.term_condition_holds(alpha, beta, acc)? {
                return Err(CommutatorError::TcNotMeetClosed { alpha, beta });
            }
            Ok(acc)
        })
        .clone()
    }

    /// `(δ : β)`: the join of every γ with C(γ, β; δ), re-verified.
    pub fn centralizer(&self, beta: usize, delta: usize) -> Result<usize, CommutatorError> {
        let mut acc = self.lat.bottom();
        for gamma in 0..self.lat.len() {
            if self.term_condition_holds(gamma, beta, delta)? {
                acc = self.lat.join(acc, gamma);
            }
        }
        if !self.term_condition_holds(acc, beta, delta)? {
            return Err(CommutatorError::CentralizerJoinFailure { beta, delta });
        }
        Ok(acc)
    }

    pub fn is_abelian_over(
        &self,
        upper: usize,
        lower: usize,
    ) -> Result<AbelianCheck, CommutatorError> {
        let c = self.commutator(upper, upper)?;
        let z = self.centralizer(upper, lower)?;
        Ok(AbelianCheck {
            abelian: self.lat.leq(c, lower),
            via_centralizer: self.lat.leq(upper, z),
        })
    }

    pub fn check_sc1(&self) -> Result<Sc1Report, CommutatorError> {
        let cm = self.lat.cm().to_vec();
        let results: Vec<Result<Option<usize>, CommutatorError>> = cm
            .par_iter()
            .map(|&phi| {
                let plus = self.lat.plus(phi).expect("meet-irreducible");
                let z = self.centralizer(plus, phi)?;
                Ok((!self.lat.leq(z, plus)).then_some(phi))
            })
            .collect();
        let mut witnesses = Vec::new();
        for r in results {
            if let Some(phi) = r? {
                witnesses.push(phi);
            }
        }
        Ok(Sc1Report {
            holds: witnesses.is_empty(),
            witnesses,
        })
    }

    /// Fill the whole commutator table in parallel.
    pub fn table(&self) -> Result<Vec<usize>, CommutatorError> {
        let m = self.lat.len();
        (0..m * m)
            .into_par_iter()
            .map(|k| self.commutator(k / m, k % m))
            .collect()
    }

    /// First pair violating `[α,β] = ([α,α] ∧ β) ∨ ([β,β] ∧ α)`.
    pub fn c1_identity_witness(&self) -> Result<Option<(usize, usize)>, CommutatorError> {
        Ok(self.laws()?.c1_identity)
    }

    pub fn laws(&self) -> Result<CommutatorLaws, CommutatorError> {
        let table = self.table()?;
        let lat = &self.lat;
        let m = lat.len();
        let c = |a: usize, b: usize| table[a * m + b];
        let pairs = || (0..m).flat_map(move |a| (0..m).map(move |b| (a, b)));
        let below_meet = pairs().find(|&(a, b)| !lat.leq(c(a, b), lat.meet(a, b)));
        let symmetry = pairs().find(|&(a, b)| c(a, b) != c(b, a));
        let mut monotonicity = None;
        'outer: for a in 0..m {
            for a2 in 0..m {
                if !lat.leq(a, a2) {
                    continue;
                }
                for b in 0..m {
                    if !lat.leq(c(a, b), c(a2, b)) || !lat.leq(c(b, a), c(b, a2)) {
                        monotonicity = Some((a, a2, b));
                        break 'outer;
                    }
                }
            }
        }
        let join_distributivity = (0..m)
            .flat_map(|a| pairs().map(move |(b, d)| (a, b, d)))
            .find(|&(a, b, d)| c(a, lat.join(b, d)) != lat.join(c(a, b), c(a, d)));
        let c1_identity = pairs().find(|&(a, b)| {
            let rhs = lat.join(lat.meet(c(a, a), b), lat.meet(c(b, b), a));
            c(a, b) != rhs
        });
        Ok(CommutatorLaws {
            below_meet,
            symmetry,
            monotonicity,
            join_distributivity,
            c1_identity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::partition::Congruence;

    fn engine(alg: FiniteAlgebra) -> CommutatorEngine {
        let lat = CongruenceLattice::new(&alg);
        CommutatorEngine::new(Arc::new(alg), Arc::new(lat), 200_000)
    }

    #[test]
    fn trivial_matrix_algebra() {
        let e = engine(fixtures::triv1());
        assert_eq!(*e.matrix_algebra(0, 0).unwrap(), vec![[0, 0, 0, 0]]);
    }

    #[test]
    fn bg4_is_abelian() {
        let e = engine(fixtures::bg4());
        let top = e.lattice().top();
        let mats = e.matrix_algebra(top, top).unwrap();
        assert!(mats.contains(&[0, 1, 1, 0]));
        assert!(e.term_condition_holds(top, top, 0).unwrap());
        assert_eq!(e.commutator(top, top).unwrap(), 0);
        for atom in 1..4 {
            assert_eq!(e.centralizer(top, atom).unwrap(), top);
            let ab = e.is_abelian_over(top, atom).unwrap();
            assert!(ab.abelian && ab.via_centralizer);
        }
        assert!(e.check_sc1().unwrap().holds);
        assert!(e.laws().unwrap().all_hold());
    }

    #[test]
    fn lat2_is_not_abelian() {
        let e = engine(fixtures::lat2());
        let top = e.lattice().top();
        assert!(!e.term_condition_holds(top, top, 0).unwrap());
        assert_eq!(e.commutator(top, top).unwrap(), top);
        assert_eq!(e.centralizer(top, 0).unwrap(), 0);
        assert!(!e.is_abelian_over(top, 0).unwrap().abelian);
        assert!(e.check_sc1().unwrap().holds);
    }

    #[test]
    fn z4_fails_sc1_at_identity() {
        let e = engine(fixtures::z4());
        let theta = e.lattice().plus(0).unwrap();
        assert_eq!(theta, 1);
        assert_eq!(e.centralizer(theta, 0).unwrap(), e.lattice().top());
        let r = e.check_sc1().unwrap();
        assert!(!r.holds);
        assert_eq!(r.witnesses, vec![0]);
    }

    #[test]
    fn hilb3_commutator_is_meet() {
        let e = engine(fixtures::hilb3());
        let lat = e.lattice();
        let top = lat.top();
        assert_eq!(e.commutator(top, top).unwrap(), top);
        for a in 0..lat.len() {
            for b in 0..lat.len() {
                assert_eq!(e.commutator(a, b).unwrap(), lat.meet(a, b));
            }
        }
        // β = Δ forces equal columns
        let alpha = lat
            .index_of(&Congruence::from_blocks(3, &[vec![0, 1], vec![2]]))
            .unwrap();
        for m in e.matrix_algebra(alpha, 0).unwrap().iter() {
            assert_eq!(m[0], m[1]);
            assert_eq!(m[2], m[3]);
        }
        assert!(e.check_sc1().unwrap().holds);
        assert!(e.laws().unwrap().all_hold());
    }

    #[test]
    fn identity_arguments() {
        for alg in [fixtures::hilb3(), fixtures::bg4(), fixtures::z4()] {
            let e = engine(alg);
            let lat = e.lattice();
            for b in 0..lat.len() {
                assert_eq!(e.commutator(0, b).unwrap(), 0);
                assert!(e.term_condition_holds(b, b, lat.top()).unwrap());
                assert!(e.is_abelian_over(b, b).unwrap().abelian);
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        let alg = fixtures::bg4();
        let lat = CongruenceLattice::new(&alg);
        let top = lat.top();
        let e = CommutatorEngine::new(Arc::new(alg), Arc::new(lat), 3);
        assert_eq!(e.commutator(top, top).unwrap_err().code(), "cap-exceeded");
    }
}
