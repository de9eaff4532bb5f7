//! Canonical JSON documents.
//!
//! Objects come out with sorted keys (serde_json's default map is ordered),
//! rationals are strings in lowest terms, and vertex sets are listed as
//! labels in string order. Ordered tuples (centers, lemma labellings) keep
//! their meaning-bearing order.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::characterization::{
    Certificate, DoubleStarWitness, Evidence, FailureReason, ForbiddenSubgraph, LemmaViolation,
    PmDecision,
};
use crate::error::{Error, Result};
use crate::graph::{Coalition, VertexId, WeightedGraph};
use crate::oracle::Feasibility;
use crate::pmas::{Allocation, AllocationScheme, SchemeTable, SchemeViolation, VerifyReport};
use crate::rational::Rational;

pub fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn label(g: &WeightedGraph, v: VertexId) -> Value {
    Value::String(g.label(v).to_owned())
}

fn sorted_labels(g: &WeightedGraph, vs: impl IntoIterator<Item = VertexId>) -> Vec<String> {
    let mut out: Vec<String> = vs.into_iter().map(|v| g.label(v).to_owned()).collect();
    out.sort();
    out
}

pub fn coalition(g: &WeightedGraph, s: &Coalition) -> Value {
    json!(sorted_labels(g, s.iter()))
}

fn tuple(g: &WeightedGraph, vs: &[VertexId]) -> Value {
    Value::Array(vs.iter().map(|&v| label(g, v)).collect())
}

pub fn witness(g: &WeightedGraph, w: &DoubleStarWitness) -> Value {
    let mut sigma = Map::new();
    sigma.insert(g.label(w.u).to_owned(), rational(&w.sigma_u));
    let mut leaves = Map::new();
    if let Some(v) = w.v {
        sigma.insert(g.label(v).to_owned(), rational(&w.sigma_v));
        for (&leaf, att) in &w.leaves {
            let mut to = Map::new();
            if let Some(x) = &att.to_u {
                to.insert(g.label(w.u).to_owned(), rational(x));
            }
            if let Some(x) = &att.to_v {
                to.insert(g.label(v).to_owned(), rational(x));
            }
            leaves.insert(g.label(leaf).to_owned(), Value::Object(to));
        }
    }
    json!({
        "centers": tuple(g, &w.centers()),
        "center_weight": rational(&w.center_weight),
        "component": coalition(g, &w.component),
        "leaves": leaves,
        "margin": rational(&w.margin),
        "sigma": sigma,
    })
}

pub fn lemma_violation(g: &WeightedGraph, l: &LemmaViolation) -> Value {
    json!({
        "type": "lemma",
        "kind": l.lemma.name(),
        "clause": l.inequality().describe(),
        "vertices": tuple(g, &l.vertices),
        "lhs": rational(&l.lhs),
        "rhs": rational(&l.rhs),
    })
}

pub fn forbidden_subgraph(g: &WeightedGraph, f: &ForbiddenSubgraph) -> Value {
    json!({
        "type": "forbidden",
        "kind": f.kind.name(),
        "vertices": sorted_labels(g, f.vertices.iter().copied()),
    })
}

pub fn certificate(g: &WeightedGraph, c: &Certificate) -> Value {
    let mut out = Map::new();
    out.insert("component".into(), coalition(g, &c.failure.component));
    let reason = match &c.failure.reason {
        FailureReason::NotDoubleStar => "NOT_DOUBLE_STAR",
        FailureReason::NoDominantPair { best, margin } => {
            out.insert("best_pair".into(), tuple(g, &[best.0, best.1]));
            out.insert("margin".into(), rational(margin));
            "NO_DOMINANT_PAIR"
        }
    };
    out.insert("reason".into(), reason.into());
    let (kind, evidence) = match &c.evidence {
        Some(Evidence::Lemma(l)) => (l.lemma.name(), lemma_violation(g, l)),
        Some(Evidence::Forbidden(f)) => (f.kind.name(), forbidden_subgraph(g, f)),
        None => (reason, Value::Null),
    };
    out.insert("kind".into(), kind.into());
    out.insert("evidence".into(), evidence);
    Value::Object(out)
}

pub fn decision(g: &WeightedGraph, d: &PmDecision) -> Value {
    json!({
        "population_monotonic": d.population_monotonic,
        "witnesses": d.witnesses.iter().map(|w| witness(g, w)).collect::<Vec<_>>(),
        "certificate": d.certificate.as_ref().map_or(Value::Null, |c| certificate(g, c)),
    })
}

pub fn scan(
    g: &WeightedGraph,
    lemmas: &[LemmaViolation],
    forbidden: &[ForbiddenSubgraph],
) -> Value {
    json!({
        "lemma_violations": lemmas.iter().map(|l| lemma_violation(g, l)).collect::<Vec<_>>(),
        "forbidden_subgraphs": forbidden.iter().map(|f| forbidden_subgraph(g, f)).collect::<Vec<_>>(),
    })
}

pub fn allocation(g: &WeightedGraph, a: &Allocation) -> Value {
    let payoff: Map<String, Value> = a
        .iter()
        .map(|(v, x)| (g.label(v).to_owned(), rational(x)))
        .collect();
    json!({
        "members": coalition(g, a.coalition()),
        "payoff": payoff,
    })
}

pub fn verify_report(g: &WeightedGraph, r: &VerifyReport) -> Value {
    let violation = match &r.violation {
        None => Value::Null,
        Some(SchemeViolation::Efficiency {
            coalition: s,
            total,
            gamma,
        }) => json!({
            "type": "efficiency",
            "coalition": coalition(g, s),
            "total": rational(total),
            "gamma": rational(gamma),
        }),
        Some(SchemeViolation::Monotonicity {
            smaller,
            larger,
            player,
            before,
            after,
        }) => json!({
            "type": "monotonicity",
            "smaller": coalition(g, smaller),
            "larger": coalition(g, larger),
            "player": label(g, *player),
            "before": rational(before),
            "after": rational(after),
        }),
    };
    json!({ "passed": r.passed(), "violation": violation })
}

/// `{"coalitions": [{"members": [...], "payoff": {...}}, ...]}`, rows sorted
/// by size and then by their sorted label lists.
pub fn scheme_table(g: &WeightedGraph, t: &SchemeTable) -> Value {
    let mut rows: Vec<(usize, Vec<String>, Value)> = (1..1u32 << t.vertex_count())
        .filter_map(|mask| t.allocation(mask))
        .map(|a| {
            let members = sorted_labels(g, a.coalition().iter());
            (members.len(), members, allocation(g, &a))
        })
        .collect();
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    json!({ "coalitions": rows.into_iter().map(|r| r.2).collect::<Vec<_>>() })
}

pub fn scheme(g: &WeightedGraph, s: &AllocationScheme) -> Result<Value> {
    Ok(scheme_table(g, &s.to_table(g.vertex_count())?))
}

fn format_error(message: impl Into<String>) -> Error {
    Error::SchemeFormat(message.into())
}

fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|_| format_error(format!("bad payoff {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from_integer)
            .ok_or_else(|| format_error(format!("payoff {n} must be an integer or a string"))),
        other => Err(format_error(format!("bad payoff {other}"))),
    }
}

/// Reads a scheme document against `g`. Rows may come in any order; missing
/// rows are left for `verify_scheme` to report.
pub fn scheme_from_json(g: &WeightedGraph, doc: &Value) -> Result<SchemeTable> {
    let rows = doc
        .get("coalitions")
        .and_then(Value::as_array)
        .ok_or_else(|| format_error("expected an object with a \"coalitions\" array"))?;
    let mut table = SchemeTable::empty(g.vertex_count())?;
    for row in rows {
        let members: Vec<&str> = row
            .get("members")
            .and_then(Value::as_array)
            .ok_or_else(|| format_error("row without a \"members\" array"))?
            .iter()
            .map(|m| {
                m.as_str()
                    .ok_or_else(|| format_error("member labels must be strings"))
            })
            .collect::<Result<_>>()?;
        let s = g
            .coalition_from_labels(&members)
            .map_err(|e| format_error(e.to_string()))?;
        if s.is_empty() || s.len() != members.len() {
            return Err(format_error(format!("bad member list {members:?}")));
        }
        let payoff = row
            .get("payoff")
            .and_then(Value::as_object)
            .ok_or_else(|| format_error("row without a \"payoff\" object"))?;
        let mut values: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for (key, x) in payoff {
            let v = g
                .vertex(key)
                .filter(|&v| s.contains(v))
                .ok_or_else(|| format_error(format!("payoff for {key:?} outside {members:?}")))?;
            values.insert(v, parse_rational(x)?);
        }
        if values.len() != s.len() {
            return Err(format_error(format!(
                "row {members:?} lacks a payoff for some member"
            )));
        }
        let mask = s.to_mask().expect("table size is capped") as u32;
        if table.row(mask).is_some() {
            return Err(format_error(format!("row {members:?} appears twice")));
        }
        table.set(Allocation::new(s, values.into_values().collect())?)?;
    }
    Ok(table)
}

pub fn feasibility(g: &WeightedGraph, f: &Feasibility) -> Value {
    json!({
        "feasible": f.feasible,
        "scheme": f.scheme.as_ref().map_or(Value::Null, |t| scheme_table(g, t)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterization::decide_population_monotonic;
    use crate::graph::parse_graph;
    use crate::pmas::{construct_scheme, SchemeMode};

    #[test]
    fn p4_decision() {
        let g = parse_graph("1 2 1\n2 3 3\n3 4 1").unwrap();
        let doc = decision(&g, &decide_population_monotonic(&g));
        assert_eq!(doc["population_monotonic"], true);
        assert_eq!(doc["witnesses"][0]["centers"], json!(["2", "3"]));
        assert_eq!(doc["witnesses"][0]["margin"], "1");
        assert_eq!(doc["certificate"], Value::Null);
    }

    #[test]
    fn c4_certificate_kind() {
        let g = parse_graph("1 2 1\n2 3 1\n3 4 1\n4 1 1").unwrap();
        let doc = decision(&g, &decide_population_monotonic(&g));
        assert_eq!(doc["certificate"]["kind"], "C4");
        assert_eq!(
            doc["certificate"]["evidence"]["vertices"],
            json!(["1", "2", "3", "4"])
        );
    }

    #[test]
    fn scheme_round_trip() {
        let g = parse_graph("b a 3\nb c 1\na d 3/2").unwrap();
        let s = construct_scheme(&g, SchemeMode::Materialized).unwrap();
        let doc = scheme(&g, &s).unwrap();
        let back = scheme_from_json(&g, &doc).unwrap();
        assert_eq!(scheme_table(&g, &back), doc);
        let rows = doc["coalitions"].as_array().unwrap();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[0]["members"], json!(["a"]));
        assert_eq!(rows[4]["members"], json!(["a", "b"]));
    }

    #[test]
    fn scheme_format_errors() {
        let g = parse_graph("1 2 1").unwrap();
        for bad in [
            json!({}),
            json!({"coalitions": [{"members": ["1", "9"], "payoff": {"1": "0", "9": "0"}}]}),
            json!({"coalitions": [{"members": ["1"], "payoff": {"1": "x"}}]}),
            json!({"coalitions": [{"members": ["1", "2"], "payoff": {"1": "1"}}]}),
            json!({"coalitions": [
                {"members": ["1"], "payoff": {"1": "0"}},
                {"members": ["1"], "payoff": {"1": "0"}}
            ]}),
        ] {
            assert!(
                matches!(scheme_from_json(&g, &bad), Err(Error::SchemeFormat(_))),
                "{bad}"
            );
        }
    }
}
