//! Edge-weighted simple graphs, coalitions and the edge-list text format.
//!
//! Vertices get dense indices in order of first appearance, so a coalition
//! over a small graph can be packed into a `u64` bitmask.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(usize);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// An undirected edge with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Rational,
}

/// A set of players, kept sorted and duplicate free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(Vec<VertexId>);

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = VertexId>) -> Self {
        let mut members: Vec<VertexId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Coalition(members)
    }

    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Coalition::new(indices.into_iter().map(VertexId))
    }

    pub fn from_mask(mask: u64) -> Self {
        Coalition(
            (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(VertexId)
                .collect(),
        )
    }

    /// Bitmask form, if every member index is below 64.
    pub fn to_mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, v| (v.0 < 64).then(|| acc | 1 << v.0))
    }

    pub fn members(&self) -> &[VertexId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition::new(self.iter().chain(other.iter()))
    }

    pub fn with(&self, v: VertexId) -> Coalition {
        Coalition::new(self.iter().chain(std::iter::once(v)))
    }

    /// Order by size, then lexicographically by member index.
    pub fn canonical_cmp(&self, other: &Coalition) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl FromIterator<VertexId> for Coalition {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        Coalition::new(iter)
    }
}

/// `G = (V, E; w)` with strictly positive exact weights. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    adjacency: Vec<Vec<(VertexId, Rational)>>,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Vertices labelled `1..=n`; edges given by zero-based index.
    pub fn from_weighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        let mut b = GraphBuilder::default();
        let ids: Vec<VertexId> = (1..=n).map(|i| b.add_vertex(&i.to_string())).collect();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            b.add_edge(ids[u], ids[v], w)
                .map_err(|r| r.into_error(0, &b))?;
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn all(&self) -> Coalition {
        Coalition(self.vertices().collect())
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.labels.len()
    }

    /// Neighbours of `v` with edge weights, sorted by neighbour index.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Rational)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn weight(&self, u: VertexId, v: VertexId) -> Option<&Rational> {
        let adj = self.adjacency.get(u.0)?;
        adj.binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| &adj[i].1)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Resolves external labels into a coalition; unknown labels are domain errors.
    pub fn coalition_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Coalition> {
        labels
            .iter()
            .map(|l| {
                self.vertex(l.as_ref())
                    .ok_or_else(|| Error::Domain(format!("unknown vertex `{}`", l.as_ref())))
            })
            .collect()
    }

    pub fn check_coalition(&self, s: &Coalition) -> Result<()> {
        match s.iter().find(|&v| !self.contains(v)) {
            Some(v) => Err(Error::Domain(format!(
                "vertex index {} is not in the graph ({} vertices)",
                v.0,
                self.vertex_count()
            ))),
            None => Ok(()),
        }
    }

    /// The same graph with every weight multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: &Rational) -> WeightedGraph {
        assert!(factor.is_positive(), "scale factor must be positive");
        let mut g = self.clone();
        for adj in &mut g.adjacency {
            for (_, w) in adj.iter_mut() {
                *w = &*w * factor;
            }
        }
        for e in &mut g.edges {
            e.weight = &e.weight * factor;
        }
        g
    }

    /// Serializes to the edge-list format; `parse_graph` inverts this exactly.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for label in &self.labels {
            let _ = writeln!(out, "{label}");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.labels[e.u.0], self.labels[e.v.0], e.weight
            );
        }
        out
    }
}

/// Why an edge could not be added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeRejection {
    SelfLoop(VertexId),
    Negative(Rational),
    Conflict {
        u: VertexId,
        v: VertexId,
        previous: Rational,
        new: Rational,
    },
}

impl EdgeRejection {
    fn into_error(self, line: usize, b: &GraphBuilder) -> Error {
        let at = if line > 0 {
            format!("line {line}: ")
        } else {
            String::new()
        };
        match self {
            EdgeRejection::SelfLoop(v) => {
                Error::Domain(format!("{at}self-loop on `{}`", b.labels[v.0]))
            }
            EdgeRejection::Negative(w) => Error::Domain(format!("{at}negative weight {w}")),
            EdgeRejection::Conflict {
                u,
                v,
                previous,
                new,
            } => Error::Conflict {
                line,
                u: b.labels[u.0].clone(),
                v: b.labels[v.0].clone(),
                first: previous.to_string(),
                second: new.to_string(),
            },
        }
    }
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    weights: BTreeMap<(VertexId, VertexId), Rational>,
}

impl GraphBuilder {
    /// Returns the existing id when the label was seen before.
    pub fn add_vertex(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = VertexId(self.labels.len());
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    /// Zero weights are accepted and dropped at `build`.
    #[allow(clippy::result_large_err)]
    pub fn add_edge(&mut self, a: VertexId, b: VertexId, w: Rational) -> Result<(), EdgeRejection> {
        if a == b {
            return Err(EdgeRejection::SelfLoop(a));
        }
        if w.is_negative() {
            return Err(EdgeRejection::Negative(w));
        }
        let key = (a.min(b), a.max(b));
        match self.weights.get(&key) {
            Some(prev) if *prev != w => Err(EdgeRejection::Conflict {
                u: key.0,
                v: key.1,
                previous: prev.clone(),
                new: w,
            }),
            Some(_) => Ok(()),
            None => {
                self.weights.insert(key, w);
                Ok(())
            }
        }
    }

    pub fn build(self) -> WeightedGraph {
        let n = self.labels.len();
        let mut adjacency: Vec<Vec<(VertexId, Rational)>> = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for ((u, v), w) in self.weights {
            if w.is_zero() {
                continue;
            }
            adjacency[u.0].push((v, w.clone()));
            adjacency[v.0].push((u, w.clone()));
            edges.push(Edge { u, v, weight: w });
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|(x, _)| *x);
        }
        WeightedGraph {
            labels: self.labels,
            index: self.index,
            adjacency,
            edges,
        }
    }
}

/// Parses the edge-list format: `u v w` declares an edge, a lone `u` an
/// isolated vertex, and `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut b = GraphBuilder::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [u] => {
                b.add_vertex(u);
            }
            [u, v, w] => {
                let weight = Rational::parse(w).map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
                let a = b.add_vertex(u);
                let c = b.add_vertex(v);
                b.add_edge(a, c, weight)
                    .map_err(|r| r.into_error(line, &b))?;
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "expected `u v weight` or a single vertex label, found {} tokens",
                        other.len()
                    ),
                })
            }
        }
    }
    Ok(b.build())
}

/// Maximal connected vertex sets, ordered by their smallest index.
pub fn connected_components(g: &WeightedGraph) -> Vec<Coalition> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(VertexId(start));
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &(u, _) in g.neighbors(v) {
                if !seen[u.0] {
                    seen[u.0] = true;
                    queue.push_back(u);
                }
            }
        }
        components.push(Coalition::new(members));
    }
    components
}

/// `G[S]`: vertices of `s` (relative order and labels kept) and every edge inside `s`.
pub fn induced_subgraph(g: &WeightedGraph, s: &Coalition) -> Result<WeightedGraph> {
    g.check_coalition(s)?;
    let mut b = GraphBuilder::default();
    let mut local = HashMap::with_capacity(s.len());
    for v in s.iter() {
        local.insert(v, b.add_vertex(g.label(v)));
    }
    for v in s.iter() {
        for (u, w) in g.neighbors(v) {
            if v < *u {
                if let Some(&lu) = local.get(u) {
                    b.add_edge(local[&v], lu, w.clone())
                        .expect("host graph is simple and positive");
                }
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    #[test]
    fn parses_fraction_and_integer_weights() {
        let g = parse_graph("1 2 3/2\n2 3 1").unwrap();
        assert_eq!(g.labels(), ["1", "2", "3"]);
        let v = |l: &str| g.vertex(l).unwrap();
        assert_eq!(g.weight(v("1"), v("2")), Some(&r("3/2")));
        assert_eq!(g.weight(v("3"), v("2")), Some(&r("1")));
        assert!(!g.has_edge(v("1"), v("3")));
    }

    #[test]
    fn zero_weight_edges_are_dropped() {
        let g = parse_graph("a b 0").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn negative_weight_is_a_domain_error() {
        assert!(matches!(parse_graph("1 2 -1"), Err(Error::Domain(_))));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match parse_graph("1 2 1\n\n1 2 3 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("# header\n1 2 x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conflicting_duplicates_are_rejected() {
        assert!(parse_graph("1 2 1\n2 1 1.0").is_ok());
        assert!(matches!(
            parse_graph("1 2 1\n2 1 2"),
            Err(Error::Conflict { line: 2, .. })
        ));
    }

    #[test]
    fn self_loops_are_rejected() {
        assert!(matches!(parse_graph("1 1 2"), Err(Error::Domain(_))));
    }

    #[test]
    fn comments_and_isolated_vertices() {
        let g = parse_graph("# a graph\nx   # lonely\ny z 2 # edge\n").unwrap();
        assert_eq!(g.labels(), ["x", "y", "z"]);
        assert_eq!(g.degree(g.vertex("x").unwrap()), 0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn components() {
        let path = parse_graph("1 2 1\n2 3 1").unwrap();
        assert_eq!(
            connected_components(&path),
            vec![Coalition::from_indices([0, 1, 2])]
        );
        let two = parse_graph("1 2 1\n3 4 1").unwrap();
        assert_eq!(
            connected_components(&two),
            vec![
                Coalition::from_indices([0, 1]),
                Coalition::from_indices([2, 3])
            ]
        );
        let single = parse_graph("1").unwrap();
        assert_eq!(
            connected_components(&single),
            vec![Coalition::from_indices([0])]
        );
    }

    #[test]
    fn induced_subgraphs() {
        let tri = parse_graph("1 2 1\n1 3 2\n2 3 3").unwrap();
        let sub = induced_subgraph(&tri, &Coalition::from_indices([0, 1])).unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.edges()[0].weight, r("1"));

        let empty = induced_subgraph(&tri, &Coalition::empty()).unwrap();
        assert_eq!(empty.vertex_count(), 0);

        let p4 = parse_graph("1 2 1\n2 3 1\n3 4 1").unwrap();
        let s = p4.coalition_from_labels(&["1", "2", "4"]).unwrap();
        let sub = induced_subgraph(&p4, &s).unwrap();
        assert_eq!(sub.labels(), ["1", "2", "4"]);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.degree(sub.vertex("4").unwrap()), 0);

        assert!(matches!(
            induced_subgraph(&p4, &Coalition::from_indices([7])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coalition_masks() {
        let s = Coalition::from_indices([3, 0, 5, 3]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_mask(), Some(0b101001));
        assert_eq!(Coalition::from_mask(0b101001), s);
        assert!(Coalition::from_indices([64]).to_mask().is_none());
        assert!(Coalition::from_indices([0, 3]).is_subset(&s));
        assert!(!Coalition::from_indices([1]).is_subset(&s));
    }
}
