//! `fregean`: analyse finite algebras with a constant 1.
//!
//! Exit codes: 0 complete, 1 a check failed, 2 input error, 3 unknown
//! results under `--strict`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fregean_core::{
    census, fixtures, parse_algebra_json, run_checks, to_dot, Analysis, AnalysisConfig,
    AnalysisReport, CensusError, CensusParams, DotView, FiniteAlgebra, TermSearchPolicy,
};

const DEFAULT_CAP: usize = 200_000;
/// Thousands of algebras share one run, so clone searches get a smaller cap.
const CENSUS_CAP: usize = 5_000;

#[derive(Parser)]
#[command(
    name = "fregean",
    version,
    about = "Congruence structure of finite algebras with a constant 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Print JSON.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Print human-readable text.
    #[arg(long)]
    text: bool,
    /// Treat unknown (capped) results as a failure, exit code 3.
    #[arg(long)]
    strict: bool,
    /// Cap on generated subuniverses in free and matrix algebras
    /// [default: 200000, or 5000 for census].
    #[arg(long, value_name = "N")]
    cap_free: Option<usize>,
    /// Largest number of meet-irreducibles for up-set enumeration.
    #[arg(long, value_name = "N", default_value_t = 20)]
    cap_cm: usize,
}

impl Common {
    fn config(&self, term_search: TermSearchPolicy, default_cap: usize) -> AnalysisConfig {
        AnalysisConfig {
            cap_free: self.cap_free.unwrap_or(default_cap),
            cap_cm: self.cap_cm,
            term_search,
        }
    }

    fn json_or(&self, default_json: bool) -> bool {
        if self.json {
            true
        } else if self.text {
            false
        } else {
            default_json
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Con,
    Cm,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and print the report (JSON by default).
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Include per-stage wall-clock timings.
        #[arg(long)]
        timings: bool,
    },
    /// Run every structural check and print a table (text by default).
    Verify {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a Graphviz rendering of Con(A) or of its meet-irreducibles.
    ExportDot {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "con")]
        what: What,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate all algebras up to a size and classify each.
    Census {
        /// Largest universe size.
        #[arg(long)]
        size: usize,
        /// Comma-separated operation arities.
        #[arg(long, default_value = "2")]
        signature: String,
        /// Write the per-algebra NDJSON stream here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Analyse the shipped fixtures first and include them in the stream.
        #[arg(long)]
        seed_fixtures: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path) -> Result<FiniteAlgebra, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_algebra_json(&text).map_err(|e| e.to_string())
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            path,
            common,
            timings,
        } => {
            let alg = match load(&path) {
                Ok(a) => a,
                Err(e) => return input_error(e),
            };
            let report = AnalysisReport::build(
                alg,
                common.config(TermSearchPolicy::Always, DEFAULT_CAP),
                timings,
            );
            if common.json_or(true) {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            let unknown = report.classification.strongly_fregean == fregean_core::Verdict::Unknown;
            if common.strict && unknown {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Verify { path, common } => {
            let alg = match load(&path) {
                Ok(a) => a,
                Err(e) => return input_error(e),
            };
            let an = Analysis::new(alg, common.config(TermSearchPolicy::Always, DEFAULT_CAP));
            let report = run_checks(&an);
            if common.json_or(false) {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                let width = report
                    .checks
                    .iter()
                    .map(|c| c.name.len())
                    .max()
                    .unwrap_or(0);
                println!(
                    "{} ({:?})",
                    an.algebra().name(),
                    an.classification().strongly_fregean
                );
                for c in &report.checks {
                    println!(
                        "{:<width$}  {:<7}  {}",
                        c.name,
                        c.status.to_string(),
                        c.detail
                    );
                }
            }
            if !report.failures().is_empty() {
                ExitCode::from(1)
            } else if common.strict && report.has_unknown() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::ExportDot { path, what, common } => {
            let alg = match load(&path) {
                Ok(a) => a,
                Err(e) => return input_error(e),
            };
            let an = Analysis::new(alg, common.config(TermSearchPolicy::Never, DEFAULT_CAP));
            let view = match what {
                What::Con => DotView::Con,
                What::Cm => DotView::Cm,
            };
            print!("{}", to_dot(an.lattice(), Some(an.pip()), view));
            ExitCode::SUCCESS
        }
        Command::Census {
            size,
            signature,
            out,
            seed_fixtures,
            common,
        } => run_census(size, &signature, out, seed_fixtures, common),
    }
}

fn run_census(
    size: usize,
    signature: &str,
    out: Option<PathBuf>,
    seed: bool,
    common: Common,
) -> ExitCode {
    let arities = match CensusParams::parse_signature(signature) {
        Ok(a) => a,
        Err(e) => return input_error(e),
    };
    let params = CensusParams {
        max_size: size,
        arities,
    };
    let seeds: Vec<(String, FiniteAlgebra)> = if seed {
        fixtures::all()
            .into_iter()
            .map(|(stem, a)| (format!("fixture-{stem}"), a))
            .collect()
    } else {
        Vec::new()
    };
    let result = census::run_census(
        &params,
        common.config(TermSearchPolicy::WhenHOrderable, CENSUS_CAP),
        &seeds,
    );
    let census = match result {
        Ok(c) => c,
        Err(e @ (CensusError::Infeasible { .. } | CensusError::Parameters(_))) => {
            return input_error(e)
        }
    };
    let summary = &census.summary;
    let write_records = |w: &mut dyn Write| -> io::Result<()> {
        for r in &census.records {
            writeln!(
                w,
                "{}",
                serde_json::to_string(r).expect("record serializes")
            )?;
        }
        Ok(())
    };
    let written = match &out {
        Some(p) => fs::File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_records(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_records(&mut w).and_then(|_| w.flush())
        }
    };
    if let Err(e) = written {
        return input_error(format!("cannot write records: {e}"));
    }
    if common.json_or(out.is_none()) {
        let line = serde_json::json!({ "summary": summary });
        println!("{line}");
    } else {
        println!(
            "{} algebras from {} raw tables: verified {}, refuted {}, unknown {}",
            summary.algebras, summary.raw, summary.verified, summary.refuted, summary.unknown
        );
        println!(
            "orderable {}, quotients orderable {}, modular Con {}, centralizer condition {}",
            summary.orderable, summary.h_orderable, summary.con_modular, summary.sc1
        );
        println!(
            "algebras with failed checks {}, with unknown checks {}",
            summary.with_failed_checks, summary.with_unknown_checks
        );
    }
    let unknown = summary.with_unknown_checks > 0 || summary.unknown > 0;
    if summary.with_failed_checks > 0 {
        ExitCode::from(1)
    } else if common.strict && unknown {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
