//! Exhaustive enumeration of small algebras of a fixed signature, one per
//! isomorphism class fixing the constant, with a verdict record for each.
//!
//! The constant is always element 0. A table set is kept only when it is
//! lexicographically least among its images under permutations fixing 0.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::analysis::{Analysis, AnalysisConfig};
use crate::checks::run_checks;
use crate::fregean::Verdict;
use crate::pip::{self, DimensionReport};
use crate::representation;
use crate::status::Status;

/// Largest number of raw table sets a census may walk through.
pub const RAW_BUDGET: u128 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("infeasible census: {raw} raw table sets exceed the budget of {budget}")]
    Infeasible { raw: u128, budget: u128 },
    #[error("bad census parameters: {0}")]
    Parameters(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusParams {
    pub max_size: usize,
    pub arities: Vec<usize>,
}

impl CensusParams {
    /// `"2"`, `"2,1"` and so on: one arity per operation.
    pub fn parse_signature(text: &str) -> Result<Vec<usize>, CensusError> {
        text.split(',')
            .map(|s| {
                s.trim().parse::<usize>().map_err(|_| {
                    CensusError::Parameters(format!("bad arity `{s}` in signature `{text}`"))
                })
            })
            .collect()
    }

    pub fn cells(&self, n: usize) -> usize {
        self.arities.iter().map(|&k| n.pow(k as u32)).sum()
    }

    /// Total raw table sets over all sizes, or `None` on overflow.
    pub fn raw_count(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for n in 1..=self.max_size {
            let cells = u32::try_from(self.cells(n)).ok()?;
            total = total.checked_add((n as u128).checked_pow(cells)?)?;
        }
        Some(total)
    }

    pub fn check(&self) -> Result<(), CensusError> {
        if self.max_size == 0 {
            return Err(CensusError::Parameters("size must be at least 1".into()));
        }
        if self.arities.is_empty() {
            return Err(CensusError::Parameters(
                "signature needs at least one operation".into(),
            ));
        }
        match self.raw_count() {
            Some(raw) if raw <= RAW_BUDGET => Ok(()),
            raw => Err(CensusError::Infeasible {
                raw: raw.unwrap_or(u128::MAX),
                budget: RAW_BUDGET,
            }),
        }
    }
}

fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..n).collect();
    permute(&mut rest, 0, &mut out);
    out.into_iter()
        .map(|p| std::iter::once(0).chain(p).collect())
        .collect()
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Image of the flattened tables under `perm`: the entry at the permuted
/// arguments is the permuted value.
fn relabel(n: usize, arities: &[usize], flat: &[usize], perm: &[usize], out: &mut [usize]) {
    let mut offset = 0;
    for &k in arities {
        let len = n.pow(k as u32);
        for idx in 0..len {
            let mut rest = idx;
            let mut target = 0;
            let mut scale = 1;
            for _ in 0..k {
                target += perm[rest % n] * scale;
                rest /= n;
                scale *= n;
            }
            out[offset + target] = perm[flat[offset + idx]];
        }
        offset += len;
    }
}

/// Lexicographically least relabelling of the flattened tables.
pub fn canonical_form(n: usize, arities: &[usize], flat: &[usize]) -> Vec<usize> {
    let mut best = flat.to_vec();
    let mut buf = vec![0; flat.len()];
    for perm in permutations_fixing_zero(n) {
        relabel(n, arities, flat, &perm, &mut buf);
        if buf < best {
            best.copy_from_slice(&buf);
        }
    }
    best
}

/// All canonical table sets of size `n`, in lexicographic order.
pub fn enumerate(n: usize, arities: &[usize]) -> Vec<Vec<usize>> {
    let cells: usize = arities.iter().map(|&k| n.pow(k as u32)).sum();
    let perms: Vec<Vec<usize>> = permutations_fixing_zero(n).into_iter().skip(1).collect();
    let mut flat = vec![0usize; cells];
    let mut buf = vec![0usize; cells];
    let mut out = Vec::new();
    loop {
        let canonical = perms.iter().all(|p| {
            relabel(n, arities, &flat, p, &mut buf);
            buf >= flat
        });
        if canonical {
            out.push(flat.clone());
        }
        // Odometer with the last cell fastest, so output is lexicographic.
        let mut i = cells;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            flat[i] += 1;
            if flat[i] < n {
                break;
            }
            flat[i] = 0;
        }
    }
}

const OP_NAMES: [&str; 4] = ["*", "f", "g", "h"];

pub fn build_algebra(name: String, n: usize, arities: &[usize], flat: &[usize]) -> FiniteAlgebra {
    let mut offset = 0;
    let ops = arities
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let len = n.pow(k as u32);
            let table = flat[offset..offset + len].to_vec();
            offset += len;
            (OP_NAMES.get(i).copied().unwrap_or("op"), k, table)
        })
        .collect();
    FiniteAlgebra::new(name, n, 0, ops).expect("census tables are valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub seq: usize,
    pub source: String,
    pub size: usize,
    pub tables: Vec<Vec<usize>>,
    pub con: usize,
    pub cm: usize,
    pub orderable: bool,
    pub one_regular: bool,
    pub h_orderable: bool,
    pub con_modular: bool,
    pub con_distributive: bool,
    pub sc1: Option<bool>,
    pub strongly_fregean: Verdict,
    pub malcev_term: &'static str,
    pub pc_term: &'static str,
    /// Dimensions per class; `None` when some class has no Boolean group.
    pub group_dims: Option<Vec<u32>>,
    pub dimension: Option<DimensionReport>,
    /// Whether the bullet classes equal the projectivity classes; only
    /// computed when the centralizer condition holds.
    pub pip_fast_agrees: Option<bool>,
    pub singleton_classes: bool,
    /// `|S| = |Con|` with the map onto S bijective, when S is available.
    pub s_bijection: Option<bool>,
    pub failed_checks: Vec<String>,
    pub unknown_checks: Vec<String>,
}

pub fn analyze_record(
    seq: usize,
    source: String,
    alg: FiniteAlgebra,
    config: AnalysisConfig,
) -> CensusRecord {
    let tables = alg.operations().iter().map(|o| o.table.clone()).collect();
    let size = alg.size();
    let an = Analysis::new(alg, config);
    let lat = an.lattice();
    let class = an.classification().clone();
    let groups = an.valid_groups();
    let pip_fast_agrees = match pip::pip_classes_fast(an.algebra(), lat, class.sc1 == Some(true)) {
        Ok(fast) => Some(
            fast.into_iter()
                .eq(an.pip().classes.iter().map(|c| c.members.clone())),
        ),
        Err(_) => None,
    };
    let s_bijection = representation::verify_representation(&an)
        .ok()
        .map(|r| r.s_bijection.status == Status::Pass && r.s_size == r.con_size);
    let checks = run_checks(&an);
    let names = |s: Status| {
        checks
            .checks
            .iter()
            .filter(|c| c.status == s)
            .map(|c| c.name.clone())
            .collect()
    };
    CensusRecord {
        seq,
        source,
        size,
        tables,
        con: lat.len(),
        cm: lat.cm().len(),
        orderable: class.orderable,
        one_regular: class.one_regular,
        h_orderable: class.h_orderable,
        con_modular: class.con_modular,
        con_distributive: class.con_distributive,
        sc1: class.sc1,
        strongly_fregean: class.strongly_fregean,
        malcev_term: class.malcev_term.label(),
        pc_term: class.pc_term.label(),
        group_dims: groups.as_ref().map(|g| g.iter().map(|g| g.dim).collect()),
        dimension: groups.map(|g| pip::dimension_formula(lat, &g)),
        pip_fast_agrees,
        singleton_classes: an.pip().all_singletons(),
        s_bijection,
        failed_checks: names(Status::Fail),
        unknown_checks: names(Status::Unknown),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub raw: u128,
    pub algebras: usize,
    pub by_size: BTreeMap<usize, usize>,
    pub verified: usize,
    pub refuted: usize,
    pub unknown: usize,
    pub orderable: usize,
    pub h_orderable: usize,
    pub con_modular: usize,
    pub sc1: usize,
    pub with_failed_checks: usize,
    pub with_unknown_checks: usize,
}

impl CensusSummary {
    pub fn from_records(raw: u128, records: &[CensusRecord]) -> Self {
        let mut s = CensusSummary {
            raw,
            algebras: records.len(),
            ..Default::default()
        };
        for r in records {
            *s.by_size.entry(r.size).or_default() += 1;
            match r.strongly_fregean {
                Verdict::Verified => s.verified += 1,
                Verdict::Refuted => s.refuted += 1,
                Verdict::Unknown => s.unknown += 1,
            }
            s.orderable += r.orderable as usize;
            s.h_orderable += r.h_orderable as usize;
            s.con_modular += r.con_modular as usize;
            s.sc1 += (r.sc1 == Some(true)) as usize;
            s.with_failed_checks += !r.failed_checks.is_empty() as usize;
            s.with_unknown_checks += !r.unknown_checks.is_empty() as usize;
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub records: Vec<CensusRecord>,
    pub summary: CensusSummary,
}

/// Run the census. With `seed` the shipped fixtures are analysed first and
/// included in the stream. Records come back in enumeration order.
pub fn run_census(
    params: &CensusParams,
    config: AnalysisConfig,
    seed: &[(String, FiniteAlgebra)],
) -> Result<Census, CensusError> {
    params.check()?;
    let raw = params.raw_count().unwrap_or(0);
    let mut jobs: Vec<(String, FiniteAlgebra)> = seed.to_vec();
    for n in 1..=params.max_size {
        for (i, flat) in enumerate(n, &params.arities).into_iter().enumerate() {
            let name = format!("census-{n}-{i}");
            jobs.push((name.clone(), build_algebra(name, n, &params.arities, &flat)));
        }
    }
    let records: Vec<CensusRecord> = jobs
        .into_par_iter()
        .enumerate()
        .map(|(seq, (source, alg))| analyze_record(seq, source, alg, config))
        .collect();
    let summary = CensusSummary::from_records(raw, &records);
    Ok(Census { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::TermSearchPolicy;
    use crate::fixtures;

    fn config() -> AnalysisConfig {
        AnalysisConfig {
            term_search: TermSearchPolicy::WhenHOrderable,
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn size_one_has_one_algebra() {
        let params = CensusParams {
            max_size: 1,
            arities: vec![2],
        };
        let c = run_census(&params, config(), &[]).unwrap();
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.records[0].con, 1);
        assert_eq!(c.records[0].strongly_fregean, Verdict::Verified);
    }

    #[test]
    fn canonical_counts_match_orbit_count() {
        // Brute force: count orbits of size-3 binary tables under the
        // transposition of 1 and 2.
        let tables = enumerate(3, &[2]);
        let mut orbits = std::collections::BTreeSet::new();
        let mut flat = vec![0usize; 9];
        for code in 0..3usize.pow(9) {
            let mut c = code;
            for cell in flat.iter_mut().rev() {
                *cell = c % 3;
                c /= 3;
            }
            orbits.insert(canonical_form(3, &[2], &flat));
        }
        assert_eq!(tables.len(), orbits.len());
        assert_eq!(enumerate(2, &[2]).len(), 16);
    }

    #[test]
    fn hilb3_is_enumerated() {
        let h = fixtures::hilb3();
        let flat = h.operations()[0].table.clone();
        let canon = canonical_form(3, &[2], &flat);
        assert!(enumerate(3, &[2]).contains(&canon));
    }

    #[test]
    fn infeasible_sizes_are_rejected() {
        let params = CensusParams {
            max_size: 4,
            arities: vec![2],
        };
        assert!(matches!(
            params.check(),
            Err(CensusError::Infeasible { .. })
        ));
        assert!(CensusParams {
            max_size: 3,
            arities: vec![2]
        }
        .check()
        .is_ok());
        assert_eq!(CensusParams::parse_signature("2,1").unwrap(), vec![2, 1]);
    }
}
