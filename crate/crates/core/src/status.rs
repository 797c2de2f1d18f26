//! Three-valued outcomes shared by the checks.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Hypotheses of the check are not met by the algebra.
    NotApplicable,
    /// A computation hit a cap, so no verdict was reached.
    Unknown,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }

    /// Combine two outcomes of parts of one check.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Unknown, _) | (_, Unknown) => Unknown,
            (NotApplicable, x) | (x, NotApplicable) => x,
            (Pass, Pass) => Pass,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotApplicable => "n/a",
            Status::Unknown => "unknown",
        })
    }
}

/// Outcome of one clause with an optional witness made of lattice or
/// element indices, depending on the clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Clause {
    pub fn pass() -> Self {
        Clause {
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(witness: Vec<usize>) -> Self {
        Clause {
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    pub fn from_witness(w: Option<Vec<usize>>) -> Self {
        match w {
            None => Clause::pass(),
            Some(w) => Clause::fail(w),
        }
    }

    pub fn with_status(status: Status) -> Self {
        Clause {
            status,
            witness: None,
        }
    }
}
