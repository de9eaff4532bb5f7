//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pmas_core::{
    constructor_harness, decide_population_monotonic, equivalence_harness, parse_graph,
    pmas_feasibility, Rational, WeightedGraph,
};

const EQUIVALENCE_SEED: u64 = 20_240_601;
const CONSTRUCTOR_SEED: u64 = 7;

struct Outcome {
    failures: usize,
}

impl Outcome {
    fn report(&mut self, id: u32, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "criterion {id}: {} {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn double_star(leaves: usize, leaf_edge: bool) -> WeightedGraph {
    let (u, v) = (0, 1);
    let mut edges = Vec::with_capacity(2 * leaves + 2);
    let weight = |k: usize| Rational::new(1 + (k % 7) as i64, 1 + (k % 3) as i64);
    for k in 0..leaves {
        let leaf = k + 2;
        match k % 3 {
            0 => edges.push((u, leaf, weight(k))),
            1 => edges.push((v, leaf, weight(k))),
            _ => {
                edges.push((u, leaf, weight(k)));
                edges.push((v, leaf, weight(k + 1)));
            }
        }
    }
    // σ_u, σ_v <= 7, so 15 dominates.
    edges.push((u, v, Rational::from_integer(15)));
    if leaf_edge {
        edges.push((2, 3, Rational::one()));
    }
    WeightedGraph::from_weighted_edges(leaves + 2, edges).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let mut out = Outcome { failures: 0 };

    let (equivalence, t12) = timed(|| equivalence_harness(6, 1000, EQUIVALENCE_SEED).unwrap());
    let ex = &equivalence.exhaustive;
    out.report(
        1,
        ex.instances == 56_008 && ex.disagreements == 0 && t12 < Duration::from_secs(15 * 60),
        format!(
            "exhaustive equivalence: {} instances, {} disagreements",
            ex.instances, ex.disagreements
        ),
    );
    let rnd = &equivalence.random;
    out.report(
        2,
        rnd.instances == 1000 && rnd.disagreements == 0 && t12 < Duration::from_secs(10 * 60),
        format!(
            "random equivalence: {} trials, {} disagreements ({:.1?} for criteria 1-2)",
            rnd.instances, rnd.disagreements, t12
        ),
    );

    let (constructor, t34) = timed(|| constructor_harness(200, 12, CONSTRUCTOR_SEED).unwrap());
    out.report(
        3,
        constructor.trials == 200
            && constructor.verify_failures == 0
            && t34 < Duration::from_secs(5 * 60),
        format!(
            "constructor soundness: {} schemes, {} verify failures ({t34:.1?})",
            constructor.trials, constructor.verify_failures
        ),
    );
    out.report(
        4,
        constructor.trials == 200 && constructor.core_failures == 0,
        format!(
            "grand coalition in core: {} core failures",
            constructor.core_failures
        ),
    );

    let flagged = ex.scanner_flagged + rnd.scanner_flagged;
    let exceptions = ex.scanner_exceptions + rnd.scanner_exceptions;
    out.report(
        5,
        flagged > 0 && exceptions == 0,
        format!("scanner soundness: {flagged} flagged instances, {exceptions} feasible"),
    );

    let star = double_star(100_000, false);
    let (pm, t_pm) = timed(|| decide_population_monotonic(&star));
    let broken = double_star(100_000, true);
    let (not_pm, t_not) = timed(|| decide_population_monotonic(&broken));
    let limit = Duration::from_secs(1);
    out.report(
        6,
        pm.population_monotonic && !not_pm.population_monotonic && t_pm < limit && t_not < limit,
        format!(
            "100000-leaf double-star: PM={} in {t_pm:.1?}; with leaf-leaf edge PM={} in {t_not:.1?}",
            pm.population_monotonic, not_pm.population_monotonic
        ),
    );

    let boundary = parse_graph("1 2 1\n1 3 1\n2 3 2").unwrap();
    let below = parse_graph("1 2 1\n1 3 1\n2 3 1999999/1000000").unwrap();
    let boundary_pm = decide_population_monotonic(&boundary).population_monotonic;
    let boundary_feasible = pmas_feasibility(&boundary).unwrap().feasible;
    let below_pm = decide_population_monotonic(&below).population_monotonic;
    let below_feasible = pmas_feasibility(&below).unwrap().feasible;
    out.report(
        7,
        boundary_pm && boundary_feasible && !below_pm && !below_feasible,
        format!(
            "triangle (1,1,2): PM={boundary_pm} oracle={boundary_feasible}; \
             (1,1,2-1/1000000): PM={below_pm} oracle={below_feasible}"
        ),
    );

    let again = equivalence_harness(6, 1000, EQUIVALENCE_SEED).unwrap();
    let constructor_again = constructor_harness(200, 12, CONSTRUCTOR_SEED).unwrap();
    let bytes = |doc: serde_json::Value| doc.to_string();
    let same_equivalence = bytes(equivalence.to_json()) == bytes(again.to_json());
    let same_constructor = bytes(constructor.to_json()) == bytes(constructor_again.to_json());
    out.report(
        8,
        same_equivalence && same_constructor,
        format!(
            "determinism: equivalence report identical={same_equivalence}, \
             constructor report identical={same_constructor}"
        ),
    );

    if out.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", out.failures);
        ExitCode::FAILURE
    }
}
