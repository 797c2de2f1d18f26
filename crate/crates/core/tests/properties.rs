//! Properties over random small algebras. Every check in the suite is
//! gated by its hypotheses, so no random algebra may produce a failure.

use fregean_core::census::canonical_form;
use fregean_core::dot::count_nodes_edges;
use fregean_core::fregean::{self, Verdict};
use fregean_core::{
    run_checks, to_dot, Analysis, AnalysisConfig, AnalysisReport, DotView, FiniteAlgebra, Status,
    TermSearchPolicy,
};
use proptest::prelude::*;

fn config() -> AnalysisConfig {
    AnalysisConfig {
        cap_free: 2_000,
        term_search: TermSearchPolicy::WhenHOrderable,
        ..AnalysisConfig::default()
    }
}

fn algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (2usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..n, n * n),
            proptest::option::of(proptest::collection::vec(0..n, n)),
        )
            .prop_map(move |(bin, un)| {
                let mut ops = vec![("*", 2, bin)];
                if let Some(u) = un {
                    ops.push(("u", 1, u));
                }
                FiniteAlgebra::new("random", n, 0, ops).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn no_check_fails(alg in algebra()) {
        let an = Analysis::new(alg, config());
        let report = run_checks(&an);
        prop_assert!(report.failures().is_empty(), "{:?}", report.failures());
    }

    #[test]
    fn classification_invariants(alg in algebra()) {
        let an = Analysis::new(alg, config());
        let c = an.classification();
        prop_assert_eq!(c.h_fregean, c.h_orderable && c.one_regular);
        if c.strongly_fregean == Verdict::Verified {
            prop_assert_eq!(c.sc1, Some(true));
            prop_assert!(c.con_modular && c.quotients_modular);
        }
        if c.orderable && c.one_permutable {
            prop_assert!(fregean::altern_witness(an.algebra(), an.lattice()).is_none());
        }
        prop_assert_eq!(
            fregean::altern_witness(an.algebra(), an.lattice()).is_none(),
            fregean::non_orderable_quotient(an.algebra(), an.lattice()).is_none()
        );
        if c.h_orderable {
            prop_assert!(c.orderable);
        }
    }

    #[test]
    fn malcev_term_gives_principal_congruence_term(alg in algebra()) {
        let an = Analysis::new(alg, config());
        let c = an.classification();
        if c.h_orderable && c.malcev_term.is_found() && !matches!(c.pc_term, fregean_core::TermSearch::Unknown { .. }) {
            prop_assert!(c.pc_term.is_found());
        }
    }

    #[test]
    fn report_and_dot_are_deterministic(alg in algebra()) {
        let a = AnalysisReport::build(alg.clone(), config(), false).to_json();
        let b = AnalysisReport::build(alg.clone(), config(), false).to_json();
        prop_assert_eq!(a, b);
        let an = Analysis::new(alg, config());
        let lat = an.lattice();
        let dot = to_dot(lat, Some(an.pip()), DotView::Con);
        let covers: usize = (0..lat.len()).map(|i| lat.upper_covers(i).len()).sum();
        prop_assert_eq!(count_nodes_edges(&dot), (lat.len(), covers));
        prop_assert_eq!(dot, to_dot(lat, Some(an.pip()), DotView::Con));
    }

    #[test]
    fn relabelling_preserves_structure(alg in algebra(), seed in any::<u64>()) {
        // A random permutation fixing the constant 0.
        let n = alg.size();
        let mut rest: Vec<usize> = (1..n).collect();
        let mut s = seed;
        for i in (1..rest.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rest.swap(i, (s >> 33) as usize % (i + 1));
        }
        let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let image = alg.permuted(&perm);
        let (a, b) = (Analysis::new(alg.clone(), config()), Analysis::new(image.clone(), config()));
        prop_assert_eq!(a.lattice().len(), b.lattice().len());
        prop_assert_eq!(a.lattice().cm().len(), b.lattice().cm().len());
        let (ca, cb) = (a.classification(), b.classification());
        prop_assert_eq!(ca.orderable, cb.orderable);
        prop_assert_eq!(ca.h_orderable, cb.h_orderable);
        prop_assert_eq!(ca.sc1, cb.sc1);
        prop_assert_eq!(ca.strongly_fregean, cb.strongly_fregean);

        let arities: Vec<usize> = alg.operations().iter().map(|o| o.arity).collect();
        let flat = |x: &FiniteAlgebra| x.operations().iter().flat_map(|o| o.table.clone()).collect::<Vec<_>>();
        prop_assert_eq!(canonical_form(n, &arities, &flat(&alg)), canonical_form(n, &arities, &flat(&image)));
    }

    #[test]
    fn verified_algebras_pass_the_core_checks(alg in algebra()) {
        let an = Analysis::new(alg, config());
        if an.classification().strongly_fregean == Verdict::Verified {
            let r = run_checks(&an);
            for name in [
                "centralizer-condition",
                "classes-form-boolean-groups",
                "chain-length-equals-sum-of-dimensions",
                "congruences-correspond-to-subgroup-upsets",
                "class-is-covers-of-plus-above-zero",
            ] {
                prop_assert_eq!(r.status_of(name), Status::Pass, "{}", name);
            }
        }
    }
}
