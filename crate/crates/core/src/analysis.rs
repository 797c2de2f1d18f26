//! Lazily computed analysis of one algebra. Every derived structure is built
//! at most once and shared between the checks that need it.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::commutator::{CommutatorEngine, CommutatorError, Sc1Report};
use crate::fregean::{self, Classification, TermSearch};
use crate::lattice::{CongruenceLattice, Projectivity};
use crate::pip::{self, BooleanGroup, PipError, PipStructure};
use crate::representation::{RepError, Representation};

/// When to run the clone searches for Malcev and principal congruence terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermSearchPolicy {
    Always,
    /// Only when every quotient is congruence orderable, the hypothesis under
    /// which the two searches are equivalent.
    WhenHOrderable,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalysisConfig {
    /// Cap on generated subuniverses (free algebras and matrix algebras).
    pub cap_free: usize,
    /// Largest number of meet-irreducibles for up-set enumeration.
    pub cap_cm: usize,
    pub term_search: TermSearchPolicy,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            cap_free: 200_000,
            cap_cm: 20,
            term_search: TermSearchPolicy::Always,
        }
    }
}

pub struct Analysis {
    pub config: AnalysisConfig,
    alg: Arc<FiniteAlgebra>,
    lat: Arc<CongruenceLattice>,
    engine: CommutatorEngine,
    projectivity: OnceLock<Projectivity>,
    pip: OnceLock<PipStructure>,
    groups: OnceLock<Vec<Result<BooleanGroup, PipError>>>,
    sc1: OnceLock<Result<Sc1Report, CommutatorError>>,
    malcev: OnceLock<TermSearch>,
    pc_term: OnceLock<TermSearch>,
    classification: OnceLock<Classification>,
    representation: OnceLock<Result<Representation, RepError>>,
}

impl Analysis {
    pub fn new(alg: FiniteAlgebra, config: AnalysisConfig) -> Self {
        let lat = Arc::new(CongruenceLattice::new(&alg));
        let alg = Arc::new(alg);
        let engine = CommutatorEngine::new(alg.clone(), lat.clone(), config.cap_free);
        Analysis {
            config,
            alg,
            lat,
            engine,
            projectivity: OnceLock::new(),
            pip: OnceLock::new(),
            groups: OnceLock::new(),
            sc1: OnceLock::new(),
            malcev: OnceLock::new(),
            pc_term: OnceLock::new(),
            classification: OnceLock::new(),
            representation: OnceLock::new(),
        }
    }

    pub fn with_defaults(alg: FiniteAlgebra) -> Self {
        Analysis::new(alg, AnalysisConfig::default())
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn lattice(&self) -> &CongruenceLattice {
        &self.lat
    }

    pub fn engine(&self) -> &CommutatorEngine {
        &self.engine
    }

    pub fn projectivity(&self) -> &Projectivity {
        self.projectivity.get_or_init(|| self.lat.projectivity())
    }

    /// Classes from projectivity of prime intervals.
    pub fn pip(&self) -> &PipStructure {
        self.pip.get_or_init(|| {
            let classes = pip::pip_classes_projective(&self.lat, self.projectivity());
            PipStructure::new(&self.lat, classes)
        })
    }

    pub fn groups(&self) -> &[Result<BooleanGroup, PipError>] {
        self.groups.get_or_init(|| {
            self.pip()
                .classes
                .iter()
                .map(|c| pip::boolean_group(&self.alg, &self.lat, c))
                .collect()
        })
    }

    /// All groups, if every class produced one.
    pub fn valid_groups(&self) -> Option<Vec<BooleanGroup>> {
        self.groups()
            .iter()
            .map(|g| g.as_ref().ok().cloned())
            .collect()
    }

    pub fn sc1(&self) -> &Result<Sc1Report, CommutatorError> {
        self.sc1.get_or_init(|| self.engine.check_sc1())
    }

    pub fn sc1_holds(&self) -> Option<bool> {
        self.sc1().as_ref().ok().map(|r| r.holds)
    }

    fn searches_allowed(&self) -> bool {
        match self.config.term_search {
            TermSearchPolicy::Always => true,
            TermSearchPolicy::Never => false,
            TermSearchPolicy::WhenHOrderable => {
                fregean::altern_witness(&self.alg, &self.lat).is_none()
            }
        }
    }

    pub fn malcev(&self) -> &TermSearch {
        self.malcev.get_or_init(|| {
            if self.searches_allowed() {
                fregean::find_malcev_term(&self.alg, self.config.cap_free)
            } else {
                TermSearch::NotSearched
            }
        })
    }

    pub fn pc_term(&self) -> &TermSearch {
        self.pc_term.get_or_init(|| {
            if self.searches_allowed() {
                fregean::find_pc_term(&self.alg, &self.lat, self.config.cap_free)
            } else {
                TermSearch::NotSearched
            }
        })
    }

    pub fn classification(&self) -> &Classification {
        self.classification.get_or_init(|| fregean::classify(self))
    }

    pub fn representation(&self) -> &Result<Representation, RepError> {
        self.representation
            .get_or_init(|| Representation::build(self))
    }
}
