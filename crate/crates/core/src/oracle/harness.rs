//! Cross-checks of the structural recognizer against the exact oracle.
//!
//! Trials run in parallel but every instance is a pure function of its
//! position and seed, and results are assembled in input order, so a report
//! depends only on its arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::generate::{
    exhaustive_graphs, pool, random_double_star, random_weighted_graph, EXHAUSTIVE_POOL,
    RANDOM_POOL,
};
use super::{pmas_feasibility, ORACLE_CAP};
use crate::characterization::{
    decide_population_monotonic, scan_forbidden_subgraphs_with, scan_weight_lemmas_with, ScanLimit,
};
use crate::error::{check_cap, Error, Result};
use crate::graph::WeightedGraph;
use crate::pmas::{construct_scheme, is_core_allocation, verify_scheme, SchemeMode};
use crate::rational::Rational;

/// Largest `n` swept exhaustively.
pub const EXHAUSTIVE_MAX_N: usize = 5;
/// Scanner soundness is only checked up to this size.
const SCANNER_CHECK_MAX_N: usize = 6;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub instances: usize,
    /// Recognizer and oracle verdicts differ.
    pub disagreements: usize,
    /// Instances where some scanner reported a violation or forbidden subgraph.
    pub scanner_flagged: usize,
    /// Flagged instances the oracle still finds feasible.
    pub scanner_exceptions: usize,
}

impl SweepStats {
    fn to_json(&self, count_key: &str) -> Value {
        json!({
            count_key: self.instances,
            "disagreements": self.disagreements,
            "scanner_flagged": self.scanner_flagged,
            "scanner_exceptions": self.scanner_exceptions,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HarnessReport {
    pub exhaustive: SweepStats,
    pub random: SweepStats,
    /// Edge lists of every disagreeing instance, exhaustive first.
    pub disagreement_dumps: Vec<String>,
    /// Edge lists of every scanner exception.
    pub scanner_exception_dumps: Vec<String>,
}

impl HarnessReport {
    pub fn agrees(&self) -> bool {
        self.exhaustive.disagreements == 0 && self.random.disagreements == 0
    }

    pub fn scanners_sound(&self) -> bool {
        self.exhaustive.scanner_exceptions == 0 && self.random.scanner_exceptions == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exhaustive": self.exhaustive.to_json("instances"),
            "random": self.random.to_json("trials"),
            "disagreement_dumps": self.disagreement_dumps,
            "scanner_exception_dumps": self.scanner_exception_dumps,
        })
    }
}

struct Outcome {
    agree: bool,
    flagged: bool,
    exception: bool,
    dump: Option<String>,
}

fn check_instance(g: &WeightedGraph) -> Outcome {
    let decided = decide_population_monotonic(g).population_monotonic;
    let feasible = pmas_feasibility(g)
        .expect("harness instances are within the oracle cap")
        .feasible;
    let flagged = g.vertex_count() <= SCANNER_CHECK_MAX_N
        && (!scan_weight_lemmas_with(g, ScanLimit::FirstAny)
            .expect("small instance")
            .is_empty()
            || !scan_forbidden_subgraphs_with(g, ScanLimit::FirstAny)
                .expect("small instance")
                .is_empty());
    let agree = decided == feasible;
    let exception = flagged && feasible;
    Outcome {
        agree,
        flagged,
        exception,
        dump: (!agree || exception).then(|| g.to_edge_list()),
    }
}

fn tally(
    graphs: &[WeightedGraph],
    stats: &mut SweepStats,
    disagreements: &mut Vec<String>,
    exceptions: &mut Vec<String>,
) {
    let outcomes: Vec<Outcome> = graphs.par_iter().map(check_instance).collect();
    stats.instances += outcomes.len();
    for o in outcomes {
        stats.disagreements += usize::from(!o.agree);
        stats.scanner_flagged += usize::from(o.flagged);
        stats.scanner_exceptions += usize::from(o.exception);
        if let Some(dump) = o.dump {
            if !o.agree {
                disagreements.push(dump.clone());
            }
            if o.exception {
                exceptions.push(dump);
            }
        }
    }
}

/// Compares [`decide_population_monotonic`] with [`pmas_feasibility`].
///
/// The exhaustive part covers every `n <= min(max_n, 5)`: all edge subsets
/// for `n <= 4` and connected ones for `n = 5`, weights from
/// [`EXHAUSTIVE_POOL`] in the order of [`exhaustive_graphs`]. The random
/// part draws `trials` graphs with `n` uniform in `[2, max_n]`, edge
/// probability 1/2 and weights from [`RANDOM_POOL`]; trial seeds are
/// successive `u64`s from a ChaCha8 stream seeded with `seed`.
pub fn equivalence_harness(max_n: usize, trials: usize, seed: u64) -> Result<HarnessReport> {
    check_cap("equivalence_harness", ORACLE_CAP, max_n)?;
    if max_n == 0 {
        return Err(Error::Domain("max_n must be at least 1".into()));
    }
    let mut report = HarnessReport::default();
    let exhaustive_pool = pool(&EXHAUSTIVE_POOL);
    for n in 1..=max_n.min(EXHAUSTIVE_MAX_N) {
        let graphs: Vec<WeightedGraph> =
            exhaustive_graphs(n, &exhaustive_pool, n == EXHAUSTIVE_MAX_N).collect();
        tally(
            &graphs,
            &mut report.exhaustive,
            &mut report.disagreement_dumps,
            &mut report.scanner_exception_dumps,
        );
    }

    let random_pool = pool(&RANDOM_POOL);
    let half = Rational::new(1, 2);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let low = max_n.min(2);
    let graphs: Vec<WeightedGraph> = (0..trials)
        .map(|_| {
            let n = master.gen_range(low..=max_n);
            let trial_seed: u64 = master.gen();
            random_weighted_graph(n, &half, &random_pool, trial_seed).expect("valid parameters")
        })
        .collect();
    tally(
        &graphs,
        &mut report.random,
        &mut report.disagreement_dumps,
        &mut report.scanner_exception_dumps,
    );
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructorReport {
    pub trials: usize,
    /// Constructed schemes rejected by `verify_scheme`.
    pub verify_failures: usize,
    /// Grand-coalition rows outside the core.
    pub core_failures: usize,
    pub failure_dumps: Vec<String>,
}

impl ConstructorReport {
    pub fn passed(&self) -> bool {
        self.verify_failures == 0 && self.core_failures == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trials": self.trials,
            "verify_failures": self.verify_failures,
            "core_failures": self.core_failures,
            "failure_dumps": self.failure_dumps,
        })
    }
}

/// Builds the scheme of `trials` random dominant-pair double-stars
/// ([`random_double_star`], seeds `seed, seed + 1, ...`) and checks it with
/// `verify_scheme`, plus the grand-coalition row with `is_core_allocation`.
pub fn constructor_harness(trials: usize, max_n: usize, seed: u64) -> Result<ConstructorReport> {
    let graphs = (0..trials as u64)
        .map(|k| random_double_star(max_n, seed.wrapping_add(k)))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = graphs
        .par_iter()
        .map(|g| -> Result<(bool, bool)> {
            let scheme = construct_scheme(g, SchemeMode::Materialized)?;
            let verified = verify_scheme(g, &scheme)?.passed();
            let grand = scheme.allocation(&g.all())?;
            Ok((verified, is_core_allocation(g, &grand)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ConstructorReport {
        trials,
        ..Default::default()
    };
    for (g, (verified, core)) in graphs.iter().zip(outcomes) {
        report.verify_failures += usize::from(!verified);
        report.core_failures += usize::from(!core);
        if !verified || !core {
            report.failure_dumps.push(g.to_edge_list());
        }
    }
    Ok(report)
}
