//! The analysis report printed by `fregean analyze`. Field order is fixed so
//! the JSON output is byte-stable; timings are only included on request.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::analysis::{Analysis, AnalysisConfig};
use crate::fregean::Classification;
use crate::pip::DimensionReport;
use crate::representation::{self, RepresentationReport};
use crate::status::Status;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct OperationInfo {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraInfo {
    pub name: String,
    pub size: usize,
    pub one: usize,
    pub operations: Vec<OperationInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeSummary {
    pub con: usize,
    pub cm: usize,
    /// Length of the longest chain.
    pub length: usize,
    pub modular: bool,
    pub distributive: bool,
    /// Congruences in index order, in block notation.
    pub congruences: Vec<String>,
    /// Indices of the meet-irreducible congruences with their unique covers.
    pub meet_irreducibles: Vec<(usize, usize)>,
    /// Cover pairs `(lower, upper)`.
    pub covers: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub members: Vec<usize>,
    pub zero: usize,
    pub plus: usize,
    pub shared_plus: bool,
    /// `None` when the class carries no Boolean group.
    pub dim: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sc1Summary {
    pub status: Status,
    pub witnesses: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RepresentationSection {
    Report(Box<RepresentationReport>),
    Unavailable { error: String, message: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: &'static str,
    pub micros: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub algebra: AlgebraInfo,
    pub config: AnalysisConfig,
    pub classification: Classification,
    pub lattice: LatticeSummary,
    pub sc1: Sc1Summary,
    pub pip_classes: Vec<ClassSummary>,
    pub dimension: Option<DimensionReport>,
    pub representation: RepresentationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl AnalysisReport {
    /// Run the full pipeline. With `timings` the wall-clock time of each
    /// stage is recorded, which makes the output non-reproducible.
    pub fn build(alg: FiniteAlgebra, config: AnalysisConfig, timings: bool) -> Self {
        let mut times = Vec::new();
        let mut clock = Instant::now();
        let mut lap = |stage: &'static str| {
            times.push(Timing {
                stage,
                micros: clock.elapsed().as_micros(),
            });
            clock = Instant::now();
        };

        let an = Analysis::new(alg, config);
        lap("congruence-lattice");
        an.pip();
        lap("pip-classes");
        an.groups();
        lap("boolean-groups");
        an.sc1();
        lap("centralizer-condition");
        let classification = an.classification().clone();
        lap("classification");
        let representation = match representation::verify_representation(&an) {
            Ok(r) => RepresentationSection::Report(Box::new(r)),
            Err(e) => RepresentationSection::Unavailable {
                error: e.code().to_string(),
                message: e.to_string(),
            },
        };
        lap("representation");

        let report = Self::assemble(&an, classification, representation);
        AnalysisReport {
            timings: timings.then_some(times),
            ..report
        }
    }

    fn assemble(
        an: &Analysis,
        classification: Classification,
        representation: RepresentationSection,
    ) -> Self {
        let alg = an.algebra();
        let lat = an.lattice();
        let algebra = AlgebraInfo {
            name: alg.name().to_string(),
            size: alg.size(),
            one: alg.one(),
            operations: alg
                .operations()
                .iter()
                .map(|o| OperationInfo {
                    name: o.name.clone(),
                    arity: o.arity,
                })
                .collect(),
        };
        let lattice = LatticeSummary {
            con: lat.len(),
            cm: lat.cm().len(),
            length: lat.length(),
            modular: lat.is_modular(),
            distributive: lat.is_distributive(),
            congruences: lat.elements().iter().map(|c| c.to_string()).collect(),
            meet_irreducibles: lat.meet_irreducibles(),
            covers: (0..lat.len())
                .flat_map(|i| lat.upper_covers(i).iter().map(move |&j| (i, j)))
                .collect(),
        };
        let sc1 = match an.sc1() {
            Ok(r) => Sc1Summary {
                status: Status::from_bool(r.holds),
                witnesses: r.witnesses.clone(),
                error: None,
            },
            Err(e) => Sc1Summary {
                status: Status::Unknown,
                witnesses: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        let pip_classes = an
            .pip()
            .classes
            .iter()
            .zip(an.groups())
            .map(|(c, g)| ClassSummary {
                members: c.members.clone(),
                zero: c.zero,
                plus: c.plus,
                shared_plus: c.shared_plus,
                dim: g.as_ref().ok().map(|g| g.dim),
                group_error: g.as_ref().err().map(|e| e.to_string()),
            })
            .collect();
        let dimension = an
            .valid_groups()
            .map(|gs| crate::pip::dimension_formula(lat, &gs));
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            algebra,
            config: an.config,
            classification,
            lattice,
            sc1,
            pip_classes,
            dimension,
            representation,
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let a = &self.algebra;
        let ops: Vec<String> = a
            .operations
            .iter()
            .map(|o| format!("{}/{}", o.name, o.arity))
            .collect();
        let _ = writeln!(
            out,
            "algebra {} (size {}, one = {}, operations {})",
            a.name,
            a.size,
            a.one,
            ops.join(" ")
        );
        let l = &self.lattice;
        let _ = writeln!(
            out,
            "Con: {} congruences, {} meet-irreducible, length {}, modular {}, distributive {}",
            l.con, l.cm, l.length, l.modular, l.distributive
        );
        for (i, c) in l.congruences.iter().enumerate() {
            let mark = match l.meet_irreducibles.iter().find(|(m, _)| *m == i) {
                Some((_, p)) => format!("  meet-irreducible, cover {p}"),
                None => String::new(),
            };
            let _ = writeln!(out, "  [{i}] {c}{mark}");
        }
        let c = &self.classification;
        let _ = writeln!(out, "strongly Fregean: {:?}", c.strongly_fregean);
        let _ = writeln!(
            out,
            "  orderable {}, 1-regular {}, quotients orderable {} ({}), 1-permutable {}",
            c.orderable, c.one_regular, c.h_orderable, c.h_orderable_source, c.one_permutable
        );
        let _ = writeln!(
            out,
            "  centralizer condition {}, Malcev term {}, principal congruence term {}",
            self.sc1.status,
            c.malcev_term.label(),
            c.pc_term.label()
        );
        for note in &c.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        let _ = writeln!(out, "classes of meet-irreducibles:");
        for p in &self.pip_classes {
            let dim = p.dim.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "  {:?} zero {} plus {} dim {}",
                p.members, p.zero, p.plus, dim
            );
        }
        if let Some(d) = &self.dimension {
            let _ = writeln!(
                out,
                "length {} vs sum of dimensions {}",
                d.length, d.sum_of_dims
            );
        }
        match &self.representation {
            RepresentationSection::Report(r) => {
                let _ = writeln!(
                    out,
                    "up-sets {}, |S| = {}, |H| = {}, |A| = {}, element image {}, surjective {}",
                    r.upsets,
                    r.s_size,
                    r.h_size,
                    r.counts.universe,
                    r.counts.element_image,
                    r.counts.surjective
                );
            }
            RepresentationSection::Unavailable { message, .. } => {
                let _ = writeln!(out, "representation unavailable: {message}");
            }
        }
        if let Some(ts) = &self.timings {
            for t in ts {
                let _ = writeln!(out, "time {}: {} us", t.stage, t.micros);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::fregean::Verdict;

    #[test]
    fn hilb3_report() {
        let r = AnalysisReport::build(fixtures::hilb3(), AnalysisConfig::default(), false);
        assert_eq!(r.lattice.con, 4);
        assert_eq!(r.lattice.cm, 2);
        assert_eq!(r.classification.strongly_fregean, Verdict::Verified);
        match &r.representation {
            RepresentationSection::Report(rep) => assert_eq!(rep.h_size, 4),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            r.to_json(),
            AnalysisReport::build(fixtures::hilb3(), AnalysisConfig::default(), false).to_json()
        );
    }

    #[test]
    fn triv1_report() {
        let r = AnalysisReport::build(fixtures::triv1(), AnalysisConfig::default(), false);
        assert_eq!(r.lattice.length, 0);
        match &r.representation {
            RepresentationSection::Report(rep) => {
                assert_eq!(rep.s_size, 1);
                assert_eq!(rep.cm.len(), 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn z4_report() {
        let r = AnalysisReport::build(fixtures::z4(), AnalysisConfig::default(), false);
        assert_eq!(r.classification.strongly_fregean, Verdict::Refuted);
        assert_eq!(r.classification.sc1, Some(false));
        assert!(r.to_json().contains("\"schema_version\": 1"));
    }
}
