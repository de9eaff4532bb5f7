//! Deciding population monotonicity.
//!
//! A matching game admits a PMAS exactly when every component of the graph
//! is a double-star (two adjacent centers plus an independent set of leaves,
//! each leaf adjacent to at least one center) whose centers `u, v` satisfy
//! `w_uv >= σ_u + σ_v`, with `σ_x` the heaviest other edge at `x` (0 if none).
//!
//! The decision itself is structural and linear time. The scanners in
//! [`scan`] only enrich negative answers with a small, checkable obstruction.

mod scan;

use std::collections::{BTreeMap, HashMap};

pub use scan::{
    scan_forbidden_subgraphs, scan_forbidden_subgraphs_with, scan_weight_lemmas,
    scan_weight_lemmas_with, ForbiddenKind, ForbiddenSubgraph, Inequality, Lemma, LemmaViolation,
    ScanLimit, FORBIDDEN_SCAN_CAP, LEMMA_SCAN_CAP,
};

use crate::error::{Error, Result};
use crate::graph::{connected_components, induced_subgraph, Coalition, VertexId, WeightedGraph};
use crate::rational::Rational;

/// Which centers a leaf is adjacent to, with the edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafAttachment {
    pub to_u: Option<Rational>,
    pub to_v: Option<Rational>,
}

/// Evidence that one component is a dominant-pair double-star.
///
/// Single-vertex components carry `v = None`, no leaves and zero weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleStarWitness {
    pub component: Coalition,
    pub u: VertexId,
    pub v: Option<VertexId>,
    pub center_weight: Rational,
    pub leaves: BTreeMap<VertexId, LeafAttachment>,
    pub sigma_u: Rational,
    pub sigma_v: Rational,
    pub margin: Rational,
}

impl DoubleStarWitness {
    fn trivial(v: VertexId) -> Self {
        DoubleStarWitness {
            component: Coalition::new([v]),
            u: v,
            v: None,
            center_weight: Rational::zero(),
            leaves: BTreeMap::new(),
            sigma_u: Rational::zero(),
            sigma_v: Rational::zero(),
            margin: Rational::zero(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.v.is_none()
    }

    pub fn centers(&self) -> Vec<VertexId> {
        std::iter::once(self.u).chain(self.v).collect()
    }

    /// Internal consistency: the recorded σ values, margin and vertex sets
    /// agree with the recorded leaf attachments.
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::Domain(format!("invalid double-star witness: {why}")));
        let Some(v) = self.v else {
            if self.component != Coalition::new([self.u]) || !self.leaves.is_empty() {
                return bad("trivial witness must cover exactly its center");
            }
            return Ok(());
        };
        if self.u == v {
            return bad("centers coincide");
        }
        if !self.center_weight.is_positive() {
            return bad("center edge weight must be positive");
        }
        let mut sigma_u = Rational::zero();
        let mut sigma_v = Rational::zero();
        for (leaf, att) in &self.leaves {
            if *leaf == self.u || *leaf == v {
                return bad("a center is listed as a leaf");
            }
            if att.to_u.is_none() && att.to_v.is_none() {
                return bad("leaf adjacent to no center");
            }
            for w in att.to_u.iter().chain(att.to_v.iter()) {
                if !w.is_positive() {
                    return bad("leaf edge weight must be positive");
                }
            }
            if let Some(w) = &att.to_u {
                sigma_u = sigma_u.max(w.clone());
            }
            if let Some(w) = &att.to_v {
                sigma_v = sigma_v.max(w.clone());
            }
        }
        if sigma_u != self.sigma_u || sigma_v != self.sigma_v {
            return bad("sigma values disagree with leaf weights");
        }
        if self.margin != &(&self.center_weight - &sigma_u) - &sigma_v {
            return bad("margin is not w_uv - sigma_u - sigma_v");
        }
        if self.margin.is_negative() {
            return bad("centers are not a dominant pair");
        }
        let expected = Coalition::new(self.leaves.keys().copied().chain([self.u, v]));
        if expected != self.component {
            return bad("component is not centers plus leaves");
        }
        Ok(())
    }

    /// `σ_c(S)`: heaviest edge from center `c` to a leaf inside `s`.
    pub fn local_sigma(&self, center: VertexId, s: &Coalition) -> Rational {
        let pick = |att: &LeafAttachment| {
            if center == self.u {
                att.to_u.clone()
            } else if Some(center) == self.v {
                att.to_v.clone()
            } else {
                None
            }
        };
        let mut best = Rational::zero();
        for leaf in s.iter() {
            if let Some(w) = self.leaves.get(&leaf).and_then(pick) {
                best = best.max(w);
            }
        }
        best
    }

    /// Closed-form `γ(S)` for `s` inside this component (unchecked).
    pub(crate) fn gamma_within(&self, s: &Coalition) -> Rational {
        let has_u = s.contains(self.u);
        let has_v = self.v.is_some_and(|v| s.contains(v));
        match (has_u, has_v) {
            (true, true) => self.center_weight.clone(),
            (true, false) => self.local_sigma(self.u, s),
            (false, true) => self.local_sigma(self.v.unwrap(), s),
            (false, false) => Rational::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// No adjacent pair covers every edge of the component.
    NotDoubleStar,
    /// Some center pairs give a double-star, but none is dominant;
    /// `best` is the pair with the largest (negative) margin.
    NoDominantPair {
        best: (VertexId, VertexId),
        margin: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralFailure {
    pub component: Coalition,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Lemma(LemmaViolation),
    Forbidden(ForbiddenSubgraph),
}

/// Why a graph is not population monotonic. The structural record is
/// authoritative; `evidence` is attached when a scanner found one cheaply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub failure: StructuralFailure,
    pub evidence: Option<Evidence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmDecision {
    pub population_monotonic: bool,
    pub witnesses: Vec<DoubleStarWitness>,
    pub certificate: Option<Certificate>,
}

/// `(is dominant, w_uv - σ_u - σ_v)` for the edge `uv`.
pub fn is_dominant_pair(g: &WeightedGraph, u: VertexId, v: VertexId) -> Result<(bool, Rational)> {
    let w_uv = g.weight(u, v).ok_or_else(|| {
        Error::Domain("dominant pair requires an edge between the centers".into())
    })?;
    let sigma = |x: VertexId, other: VertexId| {
        g.neighbors(x)
            .iter()
            .filter(|(y, _)| *y != other)
            .map(|(_, w)| w)
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    };
    let margin = &(w_uv - &sigma(u, v)) - &sigma(v, u);
    Ok((!margin.is_negative(), margin))
}

/// Adjacent pairs that could be the centers of `component`, as `(low, high)`
/// index pairs in ascending order.
///
/// Non-centers have degree at most 2, so two vertices of degree >= 3 are
/// forced, a single one is paired with each neighbour, and otherwise every
/// edge is a candidate. Three or more high-degree vertices leave nothing.
pub fn candidate_center_pairs(
    g: &WeightedGraph,
    component: &Coalition,
) -> Result<Vec<(VertexId, VertexId)>> {
    g.check_coalition(component)?;
    if component.is_empty() {
        return Err(Error::Domain("empty component".into()));
    }
    let inside = |x: VertexId| component.contains(x);
    let degree: HashMap<VertexId, usize> = component
        .iter()
        .map(|x| (x, g.neighbors(x).iter().filter(|(y, _)| inside(*y)).count()))
        .collect();
    // Connectivity within the component.
    let mut seen = vec![component.members()[0]];
    let mut stack = seen.clone();
    while let Some(x) = stack.pop() {
        for &(y, _) in g.neighbors(x) {
            if inside(y) && !seen.contains(&y) {
                seen.push(y);
                stack.push(y);
            }
        }
    }
    if seen.len() != component.len() {
        return Err(Error::Domain("component is not connected".into()));
    }
    Ok(candidates(g, component, &|x| degree[&x], &inside))
}

fn candidates(
    g: &WeightedGraph,
    component: &Coalition,
    degree: &dyn Fn(VertexId) -> usize,
    inside: &dyn Fn(VertexId) -> bool,
) -> Vec<(VertexId, VertexId)> {
    let ordered = |a: VertexId, b: VertexId| (a.min(b), a.max(b));
    let high: Vec<VertexId> = component
        .iter()
        .filter(|&x| degree(x) >= 3)
        .take(3)
        .collect();
    let mut pairs: Vec<(VertexId, VertexId)> = match high.as_slice() {
        [] => component
            .iter()
            .flat_map(|x| {
                g.neighbors(x)
                    .iter()
                    .filter(move |(y, _)| x < *y && inside(*y))
                    .map(move |&(y, _)| (x, y))
            })
            .collect(),
        [h] => g
            .neighbors(*h)
            .iter()
            .filter(|(y, _)| inside(*y))
            .map(|&(y, _)| ordered(*h, y))
            .collect(),
        [a, b] if g.has_edge(*a, *b) => vec![(*a, *b)],
        _ => Vec::new(),
    };
    pairs.sort_unstable();
    pairs
}

/// Top two incident weights of a vertex, with the neighbour of the first.
struct TopTwo {
    first: Option<(VertexId, Rational)>,
    second: Rational,
}

impl TopTwo {
    fn of(g: &WeightedGraph, x: VertexId) -> Self {
        let mut first: Option<(VertexId, Rational)> = None;
        let mut second = Rational::zero();
        for (y, w) in g.neighbors(x) {
            match &first {
                Some((_, f)) if w <= f => {
                    if *w > second {
                        second = w.clone();
                    }
                }
                _ => {
                    if let Some((_, f)) = first.take() {
                        second = f;
                    }
                    first = Some((*y, w.clone()));
                }
            }
        }
        TopTwo { first, second }
    }

    /// Heaviest incident weight ignoring the edge to `other`.
    fn excluding(&self, other: VertexId) -> Rational {
        match &self.first {
            Some((y, _)) if *y == other => self.second.clone(),
            Some((_, w)) => w.clone(),
            None => Rational::zero(),
        }
    }
}

fn build_witness(
    g: &WeightedGraph,
    component: &Coalition,
    u: VertexId,
    v: VertexId,
) -> DoubleStarWitness {
    let mut leaves = BTreeMap::new();
    for x in component.iter().filter(|&x| x != u && x != v) {
        leaves.insert(
            x,
            LeafAttachment {
                to_u: g.weight(x, u).cloned(),
                to_v: g.weight(x, v).cloned(),
            },
        );
    }
    let max_to = |pick: fn(&LeafAttachment) -> &Option<Rational>| {
        leaves
            .values()
            .filter_map(|a| pick(a).clone())
            .max()
            .unwrap_or_else(Rational::zero)
    };
    let sigma_u = max_to(|a| &a.to_u);
    let sigma_v = max_to(|a| &a.to_v);
    let center_weight = g.weight(u, v).expect("centers are adjacent").clone();
    let margin = &(&center_weight - &sigma_u) - &sigma_v;
    DoubleStarWitness {
        component: component.clone(),
        u,
        v: Some(v),
        center_weight,
        leaves,
        sigma_u,
        sigma_v,
        margin,
    }
}

fn analyse_component(
    g: &WeightedGraph,
    component: &Coalition,
) -> Result<DoubleStarWitness, StructuralFailure> {
    let members = component.members();
    if members.len() == 1 {
        return Ok(DoubleStarWitness::trivial(members[0]));
    }
    let edges: usize = members.iter().map(|&x| g.degree(x)).sum::<usize>() / 2;
    let pairs = candidates(g, component, &|x| g.degree(x), &|_| true);

    let mut tops: HashMap<VertexId, TopTwo> = HashMap::new();
    // (margin, pair) of the best structurally valid pair so far.
    let mut best: Option<(Rational, (VertexId, VertexId))> = None;
    for (u, v) in pairs {
        // With uv present, {u, v} covers every edge iff deg u + deg v - 1 = |E|.
        if g.degree(u) + g.degree(v) - 1 != edges {
            continue;
        }
        let w_uv = g.weight(u, v).expect("candidate pairs are edges");
        let su = tops
            .entry(u)
            .or_insert_with(|| TopTwo::of(g, u))
            .excluding(v);
        let sv = tops
            .entry(v)
            .or_insert_with(|| TopTwo::of(g, v))
            .excluding(u);
        let margin = &(w_uv - &su) - &sv;
        // Pairs arrive in lexicographic order, so strict improvement keeps the first on ties.
        if best.as_ref().is_none_or(|(m, _)| margin > *m) {
            best = Some((margin, (u, v)));
        }
    }
    match best {
        Some((margin, (u, v))) if !margin.is_negative() => Ok(build_witness(g, component, u, v)),
        Some((margin, pair)) => Err(StructuralFailure {
            component: component.clone(),
            reason: FailureReason::NoDominantPair { best: pair, margin },
        }),
        None => Err(StructuralFailure {
            component: component.clone(),
            reason: FailureReason::NotDoubleStar,
        }),
    }
}

/// Looks for one lemma violation or forbidden subgraph inside the failing
/// component, when it is small enough for the scanners.
fn find_evidence(g: &WeightedGraph, component: &Coalition) -> Option<Evidence> {
    if component.len() > LEMMA_SCAN_CAP {
        return None;
    }
    let sub = induced_subgraph(g, component).ok()?;
    let host = |local: &[VertexId]| -> Vec<VertexId> {
        local
            .iter()
            .map(|x| component.members()[x.index()])
            .collect()
    };
    if let Some(mut v) = scan_weight_lemmas_with(&sub, ScanLimit::FirstAny)
        .ok()?
        .into_iter()
        .next()
    {
        v.vertices = host(&v.vertices);
        return Some(Evidence::Lemma(v));
    }
    if component.len() > FORBIDDEN_SCAN_CAP {
        return None;
    }
    let mut f = scan_forbidden_subgraphs_with(&sub, ScanLimit::FirstAny)
        .ok()?
        .into_iter()
        .next()?;
    f.vertices = host(&f.vertices);
    f.vertices.sort_unstable();
    Some(Evidence::Forbidden(f))
}

/// Decides whether the matching game on `g` admits a PMAS.
///
/// On success there is one witness per component, in component order. On
/// failure the certificate names the first failing component.
pub fn decide_population_monotonic(g: &WeightedGraph) -> PmDecision {
    let mut witnesses = Vec::new();
    for component in connected_components(g) {
        match analyse_component(g, &component) {
            Ok(w) => witnesses.push(w),
            Err(failure) => {
                let evidence = find_evidence(g, &failure.component);
                return PmDecision {
                    population_monotonic: false,
                    witnesses: Vec::new(),
                    certificate: Some(Certificate { failure, evidence }),
                };
            }
        }
    }
    PmDecision {
        population_monotonic: true,
        witnesses,
        certificate: None,
    }
}
