//! The full battery of structural checks on one algebra. Each check states
//! the hypotheses it needs; when they are not met it reports `n/a` and, where
//! useful, what the computation found anyway.

use serde::Serialize;

use crate::analysis::Analysis;
use crate::fregean::{self, NaturalOrder, TermSearch, Verdict};
use crate::pip::{self, PipStructure};
use crate::representation::{self, ElementChoice, RepresentationReport};
use crate::status::{Clause, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn status_of(&self, name: &str) -> Status {
        self.get(name)
            .map(|c| c.status)
            .unwrap_or(Status::NotApplicable)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .collect()
    }

    pub fn has_unknown(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Unknown)
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn push(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
    }

    /// Record a check whose hypotheses may fail; the computed outcome goes
    /// into the detail when it is not applicable.
    fn gated(
        &mut self,
        name: &str,
        applicable: bool,
        why_not: &str,
        status: Status,
        detail: impl Into<String>,
    ) {
        let detail = detail.into();
        if applicable {
            self.push(name, status, detail);
        } else {
            let seen = if detail.is_empty() {
                format!("{status}")
            } else {
                format!("{status}: {detail}")
            };
            self.push(
                name,
                Status::NotApplicable,
                format!("{why_not} (computed: {seen})"),
            );
        }
    }

    fn clause(&mut self, name: &str, applicable: bool, why_not: &str, c: &Clause) {
        let detail = c
            .witness
            .as_ref()
            .map(|w| format!("witness {w:?}"))
            .unwrap_or_default();
        self.gated(name, applicable, why_not, c.status, detail);
    }
}

fn opt_witness<T: std::fmt::Debug>(w: Option<T>) -> (Status, String) {
    match w {
        None => (Status::Pass, String::new()),
        Some(w) => (Status::Fail, format!("witness {w:?}")),
    }
}

const NOT_VERIFIED: &str = "not verified strongly Fregean";

pub fn run_checks(an: &Analysis) -> CheckReport {
    let alg = an.algebra();
    let lat = an.lattice();
    let n = alg.size();
    let one = alg.one();
    let class = an.classification();
    let verified = class.strongly_fregean == Verdict::Verified;
    let mut b = Builder { checks: Vec::new() };

    // Lattice.
    let least = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| {
            let t = lat.principal(x, y);
            !lat.get(t).related(x, y)
                || (0..lat.len()).any(|c| lat.get(c).related(x, y) && !lat.leq(t, c))
        });
    let (s, d) = opt_witness(least);
    b.push("principal-congruence-is-least", s, d);

    let closed = (0..lat.len())
        .flat_map(|x| (0..lat.len()).map(move |y| (x, y)))
        .find(|&(x, y)| {
            lat.get(lat.meet(x, y)) != &lat.get(x).meet(lat.get(y))
                || lat.get(lat.join(x, y)) != &lat.get(x).join(lat.get(y))
                || !alg.is_compatible(&lat.get(x).join(lat.get(y)))
        });
    let (s, d) = opt_witness(closed);
    b.push("lattice-closed-under-meet-and-join", s, d);

    let cover = lat.cm().iter().copied().find(|&e| {
        let p = lat.plus(e).unwrap();
        lat.upper_covers(e).len() != 1 || (0..lat.len()).any(|g| lat.lt(e, g) && !lat.leq(p, g))
    });
    let (s, d) = opt_witness(cover);
    b.push("meet-irreducible-has-unique-cover", s, d);

    let (s, d) = opt_witness(lat.birkhoff_failure());
    b.push("congruence-is-meet-of-meet-irreducibles-above", s, d);

    let proj = an.projectivity();
    let ivs = lat.prime_intervals();
    let missing = ivs
        .iter()
        .flat_map(|&x| ivs.iter().map(move |&y| (x, y)))
        .find(|&(x, y)| {
            (lat.transposes_up(x, y) || lat.transposes_down(x, y)) && !proj.projective(x, y)
        });
    let (s, d) = opt_witness(missing.map(|(x, y)| (x.lower, x.upper, y.lower, y.upper)));
    b.push("projectivity-contains-transpositions", s, d);

    // Commutator.
    let modular = class.con_modular;
    let sc1_known = class.sc1;
    match an.engine().laws() {
        Ok(laws) => {
            let (s, d) = opt_witness(laws.below_meet);
            b.push("commutator-below-meet", s, d);
            let (s, d) = opt_witness(laws.monotonicity);
            b.push("commutator-monotone", s, d);
            let (s, d) = opt_witness(laws.symmetry);
            b.gated("commutator-symmetric", verified, NOT_VERIFIED, s, d);
            let (s, d) = opt_witness(laws.join_distributivity);
            b.gated(
                "commutator-distributes-over-joins",
                verified,
                NOT_VERIFIED,
                s,
                d,
            );
            let (s, d) = opt_witness(laws.c1_identity);
            b.gated(
                "commutator-join-identity",
                verified && sc1_known == Some(true),
                "needs the centralizer condition in a verified algebra",
                s,
                d,
            );
        }
        Err(e) => {
            for name in [
                "commutator-below-meet",
                "commutator-monotone",
                "commutator-symmetric",
                "commutator-distributes-over-joins",
                "commutator-join-identity",
            ] {
                b.push(name, Status::Unknown, e.to_string());
            }
        }
    }

    match an.sc1() {
        Ok(r) => b.gated(
            "centralizer-condition",
            verified,
            NOT_VERIFIED,
            Status::from_bool(r.holds),
            if r.holds {
                String::new()
            } else {
                format!("witnesses {:?}", r.witnesses)
            },
        ),
        Err(e) => b.push("centralizer-condition", Status::Unknown, e.to_string()),
    }

    // Classes of meet-irreducibles.
    let pipst = an.pip();
    match pip::pip_classes_fast(alg, lat, sc1_known == Some(true)) {
        Ok(fast) => {
            let projective: Vec<Vec<usize>> =
                pipst.classes.iter().map(|c| c.members.clone()).collect();
            let same = fast == projective;
            b.gated(
                "bullet-classes-match-projectivity-classes",
                modular,
                "Con is not modular",
                Status::from_bool(same),
                if same {
                    String::new()
                } else {
                    format!("bullet {fast:?} vs projective {projective:?}")
                },
            );
        }
        Err(_) => b.push(
            "bullet-classes-match-projectivity-classes",
            if sc1_known.is_none() && modular {
                Status::Unknown
            } else {
                Status::NotApplicable
            },
            "requires the centralizer condition",
        ),
    }

    let singletons = pipst.all_singletons();
    let agree = singletons == class.con_distributive;
    b.gated(
        "distributive-iff-singleton-classes",
        modular,
        "Con is not modular",
        Status::from_bool(agree),
        format!(
            "distributive={}, singleton classes={}",
            class.con_distributive, singletons
        ),
    );

    b.gated(
        "large-classes-share-abelian-cover",
        verified,
        NOT_VERIFIED,
        shared_abelian_cover(an, pipst),
        "",
    );

    let groups = an.groups();
    let group_fail = groups.iter().find_map(|g| g.as_ref().err());
    b.gated(
        "classes-form-boolean-groups",
        verified,
        NOT_VERIFIED,
        Status::from_bool(group_fail.is_none()),
        match group_fail {
            Some(e) => e.to_string(),
            None => format!(
                "dims {:?}",
                groups
                    .iter()
                    .map(|g| g.as_ref().unwrap().dim)
                    .collect::<Vec<_>>()
            ),
        },
    );

    let triple = pipst
        .classes
        .iter()
        .find_map(|c| pip::triple_law_witness(alg, lat, c));
    let (s, d) = opt_witness(triple);
    b.gated(
        "bullet-of-two-is-third-iff-meet-below",
        verified,
        NOT_VERIFIED,
        s,
        d,
    );

    let (s, d) = decomposition_status(an, pipst);
    b.gated(
        "meet-decomposes-into-class-products",
        verified,
        NOT_VERIFIED,
        s,
        d,
    );

    let loc = pip::verify_location(alg, lat, pipst, an.engine());
    type Pick = fn(&pip::ClassLocation) -> &Clause;
    let clauses: [(&str, Pick); 6] = [
        ("class-is-covers-of-plus-above-zero", |c| {
            &c.covers_above_zero
        }),
        ("class-is-cm-in-interval-zero-plus", |c| &c.cm_in_interval),
        ("congruences-above-zero-comparable-with-plus", |c| {
            &c.comparable_with_plus
        }),
        ("one-generated-atoms-above-zero", |c| &c.atoms_from_one),
        ("abelian-square-below-zero-implies-below-plus", |c| {
            &c.abelian_implies_below
        }),
        ("abelian-square-below-zero-iff-below-plus", |c| {
            &c.abelian_iff_below
        }),
    ];
    for (name, get) in clauses {
        let combined = loc.classes.iter().fold(Clause::pass(), |acc, c| {
            let x = get(c);
            if acc.status == Status::Fail {
                acc
            } else if x.status == Status::Fail {
                Clause::fail([vec![c.members[0]], x.witness.clone().unwrap_or_default()].concat())
            } else {
                Clause::with_status(acc.status.and(x.status))
            }
        });
        let applicable = verified
            || (name.starts_with("abelian-square-below-zero-implies")
                && modular
                && sc1_known == Some(true));
        b.clause(name, applicable, NOT_VERIFIED, &combined);
    }

    match an.valid_groups() {
        Some(gs) => {
            let d = pip::dimension_formula(lat, &gs);
            b.gated(
                "chain-length-equals-sum-of-dimensions",
                verified,
                NOT_VERIFIED,
                Status::from_bool(d.equal),
                format!(
                    "length {} (greedy {}), sum of dims {}",
                    d.length, d.greedy_length, d.sum_of_dims
                ),
            );
        }
        None => b.gated(
            "chain-length-equals-sum-of-dimensions",
            verified,
            NOT_VERIFIED,
            Status::Fail,
            "a class has no group",
        ),
    }

    // Orderability.
    let altern = fregean::altern_witness(alg, lat);
    let oracle = fregean::non_orderable_quotient(alg, lat);
    b.push(
        "altern-condition-matches-quotient-orderability",
        Status::from_bool(altern.is_none() == oracle.is_none()),
        format!("altern witness {altern:?}, non-orderable quotient {oracle:?}"),
    );
    if class.orderable && class.one_permutable {
        b.push(
            "orderable-and-1-permutable-gives-orderable-quotients",
            Status::from_bool(altern.is_none()),
            "",
        );
    } else {
        b.push(
            "orderable-and-1-permutable-gives-orderable-quotients",
            Status::NotApplicable,
            "needs orderable and 1-permutable",
        );
    }

    let shapes = fregean::monolith_shape(alg, lat);
    let bad = shapes
        .iter()
        .find(|(_, c)| !c.status.is_pass())
        .map(|(phi, _)| *phi);
    let (s, d) = opt_witness(bad);
    b.gated(
        "monolith-has-two-element-class-of-one",
        class.h_orderable,
        "quotients not all orderable",
        s,
        d,
    );

    match NaturalOrder::new(alg, lat) {
        Ok(order) => {
            let top = (0..n).all(|c| order.leq(c, one));
            b.push("natural-order-has-one-on-top", Status::from_bool(top), "");
            // In each subdirectly irreducible quotient the order has a unique coatom.
            let bad = if class.h_orderable {
                lat.cm().iter().copied().find(|&phi| {
                    let (q, _) = alg.quotient(lat.get(phi)).unwrap();
                    let ql = crate::lattice::CongruenceLattice::new(&q);
                    match NaturalOrder::new(&q, &ql) {
                        Ok(o) => o.coatoms_below(q.one()).len() != 1,
                        Err(_) => true,
                    }
                })
            } else {
                None
            };
            let (s, d) = opt_witness(bad);
            b.gated(
                "irreducible-quotients-have-unique-coatom",
                class.h_orderable,
                "quotients not all orderable",
                s,
                d,
            );
        }
        Err(e) => {
            b.push(
                "natural-order-has-one-on-top",
                Status::NotApplicable,
                e.to_string(),
            );
            b.push(
                "irreducible-quotients-have-unique-coatom",
                Status::NotApplicable,
                e.to_string(),
            );
        }
    }

    let searched = |t: &TermSearch| matches!(t, TermSearch::Found { .. } | TermSearch::None);
    let (malcev, pc) = (&class.malcev_term, &class.pc_term);
    if !class.h_orderable {
        b.push(
            "malcev-term-iff-principal-congruence-term",
            Status::NotApplicable,
            "quotients not all orderable",
        );
    } else if searched(malcev) && searched(pc) {
        b.push(
            "malcev-term-iff-principal-congruence-term",
            Status::from_bool(malcev.is_found() == pc.is_found()),
            format!("malcev {}, pc-term {}", malcev.label(), pc.label()),
        );
    } else {
        b.push(
            "malcev-term-iff-principal-congruence-term",
            Status::Unknown,
            format!("malcev {}, pc-term {}", malcev.label(), pc.label()),
        );
    }
    b.gated(
        "malcev-term-gives-1-permutability",
        malcev.is_found(),
        "no Malcev term",
        Status::from_bool(class.one_permutable),
        "",
    );

    b.push(
        "verified-implies-centralizer-condition",
        if verified {
            Status::from_bool(class.sc1 == Some(true))
        } else {
            Status::NotApplicable
        },
        "",
    );

    representation_checks(an, &mut b, verified);

    CheckReport { checks: b.checks }
}

fn shared_abelian_cover(an: &Analysis, pipst: &PipStructure) -> Status {
    let lat = an.lattice();
    let mut status = Status::Pass;
    for c in pipst.classes.iter().filter(|c| c.members.len() > 1) {
        if !c.shared_plus {
            return Status::Fail;
        }
        for &m in &c.members {
            match an.engine().is_abelian_over(lat.plus(m).unwrap(), m) {
                Ok(r) if r.abelian && r.via_centralizer => {}
                Ok(_) => return Status::Fail,
                Err(_) => status = Status::Unknown,
            }
        }
    }
    status
}

fn decomposition_status(an: &Analysis, pipst: &PipStructure) -> (Status, String) {
    let alg = an.algebra();
    let lat = an.lattice();
    let m = lat.len();
    for &eta in lat.cm() {
        let class = pipst.class_of(eta).unwrap();
        for x in 0..m {
            for y in 0..m {
                if !lat.leq(lat.meet(x, y), eta) {
                    continue;
                }
                if let Err(e) = pip::split_pair(lat, class, eta, x, y) {
                    return (Status::Fail, e.to_string());
                }
                if let Err(e) = pip::decompose_meet(alg, lat, pipst, eta, &[x, y]) {
                    return (Status::Fail, e.to_string());
                }
                if m <= 24 {
                    for z in 0..m {
                        if lat.leq(lat.meet(lat.meet(x, y), z), eta) {
                            if let Err(e) = pip::decompose_meet(alg, lat, pipst, eta, &[x, y, z]) {
                                return (Status::Fail, e.to_string());
                            }
                        }
                    }
                }
            }
        }
    }
    (Status::Pass, String::new())
}

fn representation_checks(an: &Analysis, b: &mut Builder, verified: bool) {
    let names = [
        "meet-irreducible-map-injective-and-antitone",
        "congruences-correspond-to-subgroup-upsets",
        "principal-congruence-sets-are-hereditary",
        "hereditary-sets-closed-under-equivalence",
        "principal-congruence-set-is-equivalence-of-element-sets",
        "subgroup-upsets-contain-meet-irreducibles-above-their-meet",
        "equivalence-is-largest-agreeing-upset",
        "hereditary-within-subgroup-within-all-upsets",
        "cover-set-is-upclosure-minus-class",
        "missing-cover-set-forces-empty-trace",
        "empty-trace-forces-missing-cover-set-for-large-classes",
        "contained-cover-set-bounds-meet",
        "distributive-lattice-families-coincide",
        "principal-term-transports-to-equivalence-bijectively",
        "element-map-image-versus-hereditary-sets",
    ];
    let report: RepresentationReport = match representation::verify_representation(an) {
        Ok(r) => r,
        Err(e) => {
            let status = match e {
                representation::RepError::CmTooLarge { .. } => Status::Unknown,
                _ if verified => Status::Fail,
                _ => Status::NotApplicable,
            };
            for name in names {
                b.push(name, status, e.to_string());
            }
            return;
        }
    };
    let class = an.classification();
    b.clause(names[0], true, "", &report.m_injective);
    b.gated(
        names[1],
        verified,
        NOT_VERIFIED,
        report
            .s_bijection
            .status
            .and(Status::from_bool(report.s_size == report.con_size)),
        format!("|S| = {}, |Con| = {}", report.s_size, report.con_size),
    );
    b.clause(names[2], verified, NOT_VERIFIED, &report.principal_in_h);
    b.clause(
        names[3],
        verified,
        NOT_VERIFIED,
        &report.h_closed_under_equiv,
    );
    b.clause(
        names[4],
        class.h_orderable,
        "quotients not all orderable",
        &report.principal_is_equiv,
    );
    b.clause(names[5], verified, NOT_VERIFIED, &report.meet_closed);
    b.clause(names[6], true, "", &report.equiv_is_largest);
    b.clause(names[7], verified, NOT_VERIFIED, &report.families_nested);
    b.clause(names[8], verified, NOT_VERIFIED, &report.u_plus_agrees);
    b.clause(
        names[9],
        verified,
        NOT_VERIFIED,
        &report.disjoint_when_not_above,
    );
    b.clause(
        names[10],
        verified,
        NOT_VERIFIED,
        &report.converse_for_large_classes,
    );
    b.clause(names[11], verified, NOT_VERIFIED, &report.meet_below_plus);
    let coincide = report.s_size == report.upsets && report.h_size == report.upsets;
    b.gated(
        names[12],
        verified && class.con_distributive,
        "needs a verified algebra with distributive Con",
        Status::from_bool(coincide),
        format!(
            "|H| = {}, |S| = {}, |Up| = {}",
            report.h_size, report.s_size, report.upsets
        ),
    );
    match &report.pc_term_transport {
        Some(c) => b.clause(names[13], verified, NOT_VERIFIED, c),
        None => b.push(
            names[13],
            Status::NotApplicable,
            format!("principal congruence term {}", class.pc_term.label()),
        ),
    }
    let counts = &report.counts;
    let unrepresented = report
        .reconstruction
        .iter()
        .filter(|c| matches!(c, ElementChoice::NotRepresentable(_)))
        .count();
    let detail = format!(
        "|H| = {}, |A| = {}, image of a -> M(a) = {}, surjective = {}, unrepresented hereditary sets = {}, singleton-class exceptions to the converse = {}",
        counts.h, counts.universe, counts.element_image, counts.surjective, unrepresented, report.converse_exceptions_singletons
    );
    // Without a principal congruence term the map need not be onto; the image
    // must still sit inside H(A) and reconstruction must agree with it.
    let consistent = report
        .element_map
        .iter()
        .all(|&s| report.h_family.contains(&s))
        && report
            .reconstruction
            .iter()
            .zip(&report.h_family)
            .all(|(c, &z)| match c {
                ElementChoice::Represented(a) => report.element_map[*a] == z,
                ElementChoice::NotRepresentable(a) => report.element_map[*a] != z,
            })
        && (unrepresented == 0) == counts.surjective;
    b.gated(
        names[14],
        verified,
        NOT_VERIFIED,
        Status::from_bool(consistent),
        detail,
    );
}
