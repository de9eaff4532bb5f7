//! `pmas`: population monotonic allocation schemes for matching games.
//!
//! Every subcommand reads an edge-list file and prints one JSON document.
//! Exit status is 0 on a positive result, 1 on a negative verdict (not PM,
//! failed verification, infeasible, scanner hits, harness disagreement)
//! and 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pmas_core::characterization::ScanLimit;
use pmas_core::{
    characteristic_value, construct_scheme, decide_population_monotonic, double_star_gamma,
    equivalence_harness, json, parse_graph, pmas_feasibility, scan_forbidden_subgraphs_with,
    scan_weight_lemmas_with, verify_scheme, AllocationScheme, Coalition, Error, PmasRule, Rational,
    SchemeMode, WeightedGraph,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "pmas",
    version,
    about = "PMAS decision, construction and verification for matching games"
)]
struct Cli {
    /// Upper bound on worker threads for parallel scans.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the game has a PMAS; prints witnesses or a certificate.
    Check { file: PathBuf },
    /// Value of a coalition: maximum matching weight of the induced subgraph.
    Gamma {
        file: PathBuf,
        #[arg(long, value_name = "LABELS")]
        coalition: String,
    },
    /// Materialize the constructive scheme.
    Pmas {
        file: PathBuf,
        /// Write the scheme here instead of standard output.
        #[arg(long, value_name = "SCHEME.json")]
        out: Option<PathBuf>,
    },
    /// Payoffs of one coalition under the constructive scheme, at any size.
    Allocate {
        file: PathBuf,
        #[arg(long, value_name = "LABELS")]
        coalition: String,
    },
    /// Check a scheme document for efficiency and monotonicity.
    Verify {
        file: PathBuf,
        #[arg(long, value_name = "SCHEME.json")]
        scheme: PathBuf,
    },
    /// List weight-inequality violations and forbidden induced subgraphs.
    Scan {
        file: PathBuf,
        /// Stop at the first hit of each kind.
        #[arg(long)]
        first: bool,
    },
    /// Exact LP feasibility of a PMAS (at most 7 vertices).
    Oracle { file: PathBuf },
    /// Compare the structural decision with the LP oracle.
    Harness {
        #[arg(long = "max-n", default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Printed document plus whether the verdict was positive.
struct Output {
    doc: Value,
    ok: bool,
}

impl Output {
    fn ok(doc: Value) -> Self {
        Output { doc, ok: true }
    }

    fn verdict(doc: Value, ok: bool) -> Self {
        Output { doc, ok }
    }
}

fn load(path: &Path) -> Result<WeightedGraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn coalition(g: &WeightedGraph, labels: &str) -> Result<Coalition, Error> {
    let labels: Vec<&str> = labels
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    g.coalition_from_labels(&labels)
}

/// Exact DP for small coalitions, the double-star closed form beyond that.
fn gamma(g: &WeightedGraph, s: &Coalition) -> Result<Rational, Error> {
    match characteristic_value(g, s) {
        Err(Error::Capacity { .. }) => {
            let decision = decide_population_monotonic(g);
            if !decision.population_monotonic {
                return characteristic_value(g, s);
            }
            let mut total = Rational::zero();
            for w in &decision.witnesses {
                let part = Coalition::new(s.iter().filter(|&v| w.component.contains(v)));
                if !part.is_empty() {
                    total += double_star_gamma(w, &part)?;
                }
            }
            Ok(total)
        }
        other => other,
    }
}

fn not_pm(g: &WeightedGraph, err: Error) -> Result<Output, Error> {
    match err {
        Error::NotPopulationMonotonic(decision) => Ok(Output::verdict(
            json!({
                "error": "the game is not population monotonic",
                "certificate": decision.certificate.as_ref().map(|c| json::certificate(g, c)),
            }),
            false,
        )),
        other => Err(other),
    }
}

fn run(command: Command) -> Result<Output, String> {
    let fail = |e: Error| e.to_string();
    match command {
        Command::Check { file } => {
            let g = load(&file)?;
            let d = decide_population_monotonic(&g);
            Ok(Output::verdict(
                json::decision(&g, &d),
                d.population_monotonic,
            ))
        }
        Command::Gamma {
            file,
            coalition: labels,
        } => {
            let g = load(&file)?;
            let s = coalition(&g, &labels).map_err(fail)?;
            let value = gamma(&g, &s).map_err(fail)?;
            Ok(Output::ok(json!({ "gamma": json::rational(&value) })))
        }
        Command::Pmas { file, out } => {
            let g = load(&file)?;
            let scheme = match construct_scheme(&g, SchemeMode::Materialized) {
                Ok(s) => s,
                Err(e) => return not_pm(&g, e).map_err(fail),
            };
            let doc = json::scheme(&g, &scheme).map_err(fail)?;
            match out {
                Some(path) => {
                    fs::write(&path, pretty(&doc))
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    Ok(Output::ok(Value::Null))
                }
                None => Ok(Output::ok(doc)),
            }
        }
        Command::Allocate {
            file,
            coalition: labels,
        } => {
            let g = load(&file)?;
            let s = coalition(&g, &labels).map_err(fail)?;
            let rule = match PmasRule::new(&g) {
                Ok(r) => r,
                Err(e) => return not_pm(&g, e).map_err(fail),
            };
            let a = rule.allocation(&s).map_err(fail)?;
            Ok(Output::ok(json::allocation(&g, &a)))
        }
        Command::Verify { file, scheme } => {
            let g = load(&file)?;
            let text =
                fs::read_to_string(&scheme).map_err(|e| format!("{}: {e}", scheme.display()))?;
            let doc: Value =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", scheme.display()))?;
            let table = json::scheme_from_json(&g, &doc).map_err(fail)?;
            let report = verify_scheme(&g, &AllocationScheme::Table(table)).map_err(fail)?;
            Ok(Output::verdict(
                json::verify_report(&g, &report),
                report.passed(),
            ))
        }
        Command::Scan { file, first } => {
            let g = load(&file)?;
            let limit = if first {
                ScanLimit::FirstPerKind
            } else {
                ScanLimit::All
            };
            let lemmas = scan_weight_lemmas_with(&g, limit).map_err(fail)?;
            let forbidden = scan_forbidden_subgraphs_with(&g, limit).map_err(fail)?;
            let clean = lemmas.is_empty() && forbidden.is_empty();
            Ok(Output::verdict(json::scan(&g, &lemmas, &forbidden), clean))
        }
        Command::Oracle { file } => {
            let g = load(&file)?;
            let f = pmas_feasibility(&g).map_err(fail)?;
            Ok(Output::verdict(json::feasibility(&g, &f), f.feasible))
        }
        Command::Harness {
            max_n,
            trials,
            seed,
        } => {
            let report = equivalence_harness(max_n, trials, seed).map_err(fail)?;
            let ok = report.agrees() && report.scanners_sound();
            Ok(Output::verdict(report.to_json(), ok))
        }
    }
}

fn pretty(doc: &Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(out) => {
            if !out.doc.is_null() {
                print!("{}", pretty(&out.doc));
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
