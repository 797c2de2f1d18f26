//! Congruence lattices of finite algebras with a constant 1: prime-interval
//! projectivity on meet-irreducible congruences, the Boolean groups living on
//! its classes, and the up-set representations built from them.

pub mod algebra;
pub mod analysis;
pub mod census;
pub mod checks;
pub mod commutator;
pub mod dot;
pub mod fixtures;
pub mod fregean;
pub mod lattice;
pub mod partition;
pub mod pip;
pub mod report;
pub mod representation;
pub mod status;

pub use algebra::{
    free_algebra, generate_dense, generate_subuniverse, generate_until, parse_algebra_json,
    validate_algebra, AlgebraError, CapExceeded, DenseSubuniverse, ElementVector, FiniteAlgebra,
    RawAlgebra, Signature, Subuniverse, Term,
};
pub use analysis::{Analysis, AnalysisConfig, TermSearchPolicy};
pub use census::{run_census, Census, CensusError, CensusParams, CensusRecord, CensusSummary};
pub use checks::{run_checks, Check, CheckReport};
pub use commutator::{CommutatorEngine, CommutatorError};
pub use dot::{to_dot, DotView};
pub use fregean::{Classification, NaturalOrder, TermSearch, Verdict};
pub use lattice::{
    congruence_generated_by, principal_congruence, CongruenceLattice, PrimeInterval, Projectivity,
};
pub use partition::{Congruence, Relation, UnionFind};
pub use pip::{BooleanGroup, PipClass, PipError, PipStructure};
pub use report::AnalysisReport;
pub use representation::{RepError, Representation, UpSet};
pub use status::{Clause, Status};
