//! Induced-pattern scanners: weight inequalities on K3 / P4 / paw / diamond
//! and the weight-free forbidden structures C4, K4, P5, C5, co-banner and
//! butterfly.
//!
//! Every pattern is connected, so candidates are exactly the connected
//! vertex sets of size 3, 4 and 5. These are enumerated once each with the
//! ESU scheme (extend a set only by exclusive neighbours with a larger index
//! than the root), then classified from their induced edges.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{check_cap, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::rational::Rational;

pub const LEMMA_SCAN_CAP: usize = 500;
pub const FORBIDDEN_SCAN_CAP: usize = 200;

/// How many hits a scan collects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanLimit {
    All,
    FirstPerKind,
    FirstAny,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lemma {
    K3,
    P4,
    Paw,
    Diamond,
}

/// `w(lhs) >= w(rhs[0]) + w(rhs[1])`, edges given by 1-based tuple positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub lhs: (usize, usize),
    pub rhs: [(usize, usize); 2],
}

const fn ineq(lhs: (usize, usize), a: (usize, usize), b: (usize, usize)) -> Inequality {
    Inequality { lhs, rhs: [a, b] }
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::K3, Lemma::P4, Lemma::Paw, Lemma::Diamond];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::K3 => "K3",
            Lemma::P4 => "P4",
            Lemma::Paw => "PAW",
            Lemma::Diamond => "DIAMOND",
        }
    }

    /// Edge set of the pattern over tuple positions `1..=k`.
    pub fn pattern(self) -> &'static [(usize, usize)] {
        match self {
            Lemma::K3 => &[(1, 2), (1, 3), (2, 3)],
            Lemma::P4 => &[(1, 2), (2, 3), (3, 4)],
            Lemma::Paw => &[(1, 2), (2, 3), (2, 4), (3, 4)],
            Lemma::Diamond => &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)],
        }
    }

    pub fn clauses(self) -> &'static [Inequality] {
        const K3: [Inequality; 1] = [ineq((2, 3), (1, 2), (1, 3))];
        const P4: [Inequality; 1] = [ineq((2, 3), (1, 2), (3, 4))];
        const PAW: [Inequality; 2] = [ineq((2, 3), (1, 2), (3, 4)), ineq((2, 3), (2, 4), (3, 4))];
        const DIAMOND: [Inequality; 2] =
            [ineq((2, 3), (1, 2), (1, 3)), ineq((2, 3), (2, 4), (3, 4))];
        match self {
            Lemma::K3 => &K3,
            Lemma::P4 => &P4,
            Lemma::Paw => &PAW,
            Lemma::Diamond => &DIAMOND,
        }
    }
}

impl Inequality {
    pub fn describe(&self) -> String {
        let e = |(a, b): (usize, usize)| format!("w{a}{b}");
        format!("{} >= {} + {}", e(self.lhs), e(self.rhs[0]), e(self.rhs[1]))
    }
}

/// One violated weight inequality on an induced pattern.
///
/// `vertices` follows the lemma's labelling (position `k` is vertex `k+1`),
/// `clause` indexes [`Lemma::clauses`], and `lhs < rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaViolation {
    pub lemma: Lemma,
    pub clause: usize,
    pub vertices: Vec<VertexId>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl LemmaViolation {
    pub fn inequality(&self) -> Inequality {
        self.lemma.clauses()[self.clause]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ForbiddenKind {
    C4,
    K4,
    P5,
    C5,
    CoBanner,
    Butterfly,
}

impl ForbiddenKind {
    pub const ALL: [ForbiddenKind; 6] = [
        ForbiddenKind::C4,
        ForbiddenKind::K4,
        ForbiddenKind::P5,
        ForbiddenKind::C5,
        ForbiddenKind::CoBanner,
        ForbiddenKind::Butterfly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ForbiddenKind::C4 => "C4",
            ForbiddenKind::K4 => "K4",
            ForbiddenKind::P5 => "P5",
            ForbiddenKind::C5 => "C5",
            ForbiddenKind::CoBanner => "CO_BANNER",
            ForbiddenKind::Butterfly => "BUTTERFLY",
        }
    }

    pub fn order(self) -> usize {
        match self {
            ForbiddenKind::C4 | ForbiddenKind::K4 => 4,
            _ => 5,
        }
    }

    /// A labelled representative over positions `1..=order`.
    pub fn pattern(self) -> &'static [(usize, usize)] {
        match self {
            ForbiddenKind::C4 => &[(1, 2), (2, 3), (3, 4), (1, 4)],
            ForbiddenKind::K4 => &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
            ForbiddenKind::P5 => &[(1, 2), (2, 3), (3, 4), (4, 5)],
            ForbiddenKind::C5 => &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)],
            ForbiddenKind::CoBanner => &[(1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
            ForbiddenKind::Butterfly => &[(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)],
        }
    }
}

/// An induced copy of a forbidden structure; `vertices` is sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ForbiddenSubgraph {
    pub kind: ForbiddenKind,
    pub vertices: Vec<VertexId>,
}

/// Calls `visit` once for every connected vertex set of size `k` whose
/// smallest vertex is `root`.
fn connected_sets_from<F>(
    g: &WeightedGraph,
    root: VertexId,
    k: usize,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[VertexId]) -> ControlFlow<()>,
{
    let ext: Vec<VertexId> = g
        .neighbors(root)
        .iter()
        .map(|&(u, _)| u)
        .filter(|&u| u > root)
        .collect();
    let mut sub = vec![root];
    extend(g, &mut sub, ext, root, k, visit)
}

fn extend<F>(
    g: &WeightedGraph,
    sub: &mut Vec<VertexId>,
    mut ext: Vec<VertexId>,
    root: VertexId,
    k: usize,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[VertexId]) -> ControlFlow<()>,
{
    if sub.len() == k {
        return visit(sub);
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &(u, _) in g.neighbors(w) {
            if u <= root || sub.contains(&u) || next.contains(&u) {
                continue;
            }
            if sub.iter().any(|&s| g.has_edge(s, u)) {
                continue;
            }
            next.push(u);
        }
        sub.push(w);
        let flow = extend(g, sub, next, root, k, visit);
        sub.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

fn w(g: &WeightedGraph, a: VertexId, b: VertexId) -> &Rational {
    g.weight(a, b).expect("pattern edge present")
}

/// Degrees inside `set`, plus the induced edge count.
fn local_degrees(g: &WeightedGraph, set: &[VertexId]) -> (Vec<usize>, usize) {
    let mut deg = vec![0; set.len()];
    let mut m = 0;
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if g.has_edge(set[i], set[j]) {
                deg[i] += 1;
                deg[j] += 1;
                m += 1;
            }
        }
    }
    (deg, m)
}

fn check(g: &WeightedGraph, lemma: Lemma, labelled: &[VertexId], out: &mut Vec<LemmaViolation>) {
    for (clause, ineq) in lemma.clauses().iter().enumerate() {
        let at = |(a, b): (usize, usize)| w(g, labelled[a - 1], labelled[b - 1]);
        let lhs = at(ineq.lhs).clone();
        let rhs = at(ineq.rhs[0]) + at(ineq.rhs[1]);
        if lhs < rhs {
            out.push(LemmaViolation {
                lemma,
                clause,
                vertices: labelled.to_vec(),
                lhs,
                rhs,
            });
        }
    }
}

fn lemma_violations_in(g: &WeightedGraph, set: &[VertexId], out: &mut Vec<LemmaViolation>) {
    let (deg, m) = local_degrees(g, set);
    match (set.len(), m) {
        (3, 3) => {
            // Label so that w12 <= w13 <= w23.
            let (a, b, c) = (set[0], set[1], set[2]);
            let mut edges = [
                (w(g, a, b), a, b, c),
                (w(g, a, c), a, c, b),
                (w(g, b, c), b, c, a),
            ];
            edges.sort_by(|x, y| x.0.cmp(y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
            let one = edges[2].3;
            let other =
                |e: &(&Rational, VertexId, VertexId, VertexId)| if e.1 == one { e.2 } else { e.1 };
            let two = other(&edges[0]);
            let three = other(&edges[1]);
            check(g, Lemma::K3, &[one, two, three], out);
        }
        (4, 3) if deg.iter().all(|&d| d <= 2) => {
            let ends: Vec<usize> = (0..4).filter(|&i| deg[i] == 1).collect();
            let start = set[ends[0]];
            let mut path = vec![start];
            while path.len() < 4 {
                let last = *path.last().unwrap();
                let next = set
                    .iter()
                    .copied()
                    .find(|&x| !path.contains(&x) && g.has_edge(last, x))
                    .expect("path is connected");
                path.push(next);
            }
            check(g, Lemma::P4, &path, out);
        }
        (4, 4) if deg.contains(&1) => {
            let pendant = set[deg.iter().position(|&d| d == 1).unwrap()];
            let hub = set[deg.iter().position(|&d| d == 3).unwrap()];
            let mut rest: Vec<VertexId> = set
                .iter()
                .copied()
                .filter(|&x| x != pendant && x != hub)
                .collect();
            // Position 3 carries the heavier edge to the hub; ties keep index order.
            if w(g, hub, rest[1]) > w(g, hub, rest[0]) {
                rest.swap(0, 1);
            }
            check(g, Lemma::Paw, &[pendant, hub, rest[0], rest[1]], out);
        }
        (4, 5) => {
            let spine: Vec<VertexId> = (0..4).filter(|&i| deg[i] == 3).map(|i| set[i]).collect();
            let tips: Vec<VertexId> = (0..4).filter(|&i| deg[i] == 2).map(|i| set[i]).collect();
            check(
                g,
                Lemma::Diamond,
                &[tips[0], spine[0], spine[1], tips[1]],
                out,
            );
        }
        _ => {}
    }
}

fn has_triangle(g: &WeightedGraph, set: &[VertexId]) -> bool {
    let n = set.len();
    (0..n).any(|i| {
        (i + 1..n).any(|j| {
            g.has_edge(set[i], set[j])
                && (j + 1..n).any(|k| g.has_edge(set[i], set[k]) && g.has_edge(set[j], set[k]))
        })
    })
}

fn classify_forbidden(g: &WeightedGraph, set: &[VertexId]) -> Option<ForbiddenKind> {
    let (mut deg, m) = local_degrees(g, set);
    deg.sort_unstable();
    match (set.len(), m, deg.as_slice()) {
        (4, 4, [2, 2, 2, 2]) => Some(ForbiddenKind::C4),
        (4, 6, _) => Some(ForbiddenKind::K4),
        (5, 4, [1, 1, 2, 2, 2]) => Some(ForbiddenKind::P5),
        (5, 5, [2, 2, 2, 2, 2]) => Some(ForbiddenKind::C5),
        // The banner shares this degree sequence but has no triangle.
        (5, 5, [1, 2, 2, 2, 3]) if has_triangle(g, set) => Some(ForbiddenKind::CoBanner),
        (5, 6, [2, 2, 2, 2, 4]) => Some(ForbiddenKind::Butterfly),
        _ => None,
    }
}

/// Runs `per_set` over all connected sets of the given sizes, honouring `limit`.
/// `kind_of` identifies the hit kind for `FirstPerKind`.
fn scan<T, K, F>(
    g: &WeightedGraph,
    sizes: &[usize],
    limit: ScanLimit,
    per_set: F,
    kind_of: impl Fn(&T) -> K,
) -> Vec<T>
where
    T: Send,
    K: PartialEq,
    F: Fn(&[VertexId], &mut Vec<T>) + Sync,
{
    if limit == ScanLimit::All {
        return g
            .vertices()
            .collect::<Vec<_>>()
            .into_par_iter()
            .flat_map_iter(|root| {
                let mut hits = Vec::new();
                for &k in sizes {
                    let _ = connected_sets_from(g, root, k, &mut |set: &[VertexId]| {
                        let mut sorted = set.to_vec();
                        sorted.sort_unstable();
                        per_set(&sorted, &mut hits);
                        ControlFlow::Continue(())
                    });
                }
                hits
            })
            .collect();
    }
    let mut hits: Vec<T> = Vec::new();
    'sizes: for &k in sizes {
        for root in g.vertices() {
            let flow = connected_sets_from(g, root, k, &mut |set: &[VertexId]| {
                let mut sorted = set.to_vec();
                sorted.sort_unstable();
                let mut found = Vec::new();
                per_set(&sorted, &mut found);
                for hit in found {
                    let kind = kind_of(&hit);
                    if !hits.iter().any(|h| kind_of(h) == kind) {
                        hits.push(hit);
                        if limit == ScanLimit::FirstAny {
                            return ControlFlow::Break(());
                        }
                    }
                }
                ControlFlow::Continue(())
            });
            if flow.is_break() {
                break 'sizes;
            }
        }
    }
    hits
}

/// Every violated instance of the K3, P4, paw and diamond inequalities, sorted.
pub fn scan_weight_lemmas(g: &WeightedGraph) -> Result<Vec<LemmaViolation>> {
    scan_weight_lemmas_with(g, ScanLimit::All)
}

pub fn scan_weight_lemmas_with(g: &WeightedGraph, limit: ScanLimit) -> Result<Vec<LemmaViolation>> {
    check_cap("scan_weight_lemmas", LEMMA_SCAN_CAP, g.vertex_count())?;
    let mut hits = scan(
        g,
        &[3, 4],
        limit,
        |set, out| lemma_violations_in(g, set, out),
        |v: &LemmaViolation| v.lemma,
    );
    hits.sort_by(|a, b| (a.lemma, &a.vertices, a.clause).cmp(&(b.lemma, &b.vertices, b.clause)));
    Ok(hits)
}

/// Every induced C4, K4, P5, C5, co-banner and butterfly, sorted.
pub fn scan_forbidden_subgraphs(g: &WeightedGraph) -> Result<Vec<ForbiddenSubgraph>> {
    scan_forbidden_subgraphs_with(g, ScanLimit::All)
}

pub fn scan_forbidden_subgraphs_with(
    g: &WeightedGraph,
    limit: ScanLimit,
) -> Result<Vec<ForbiddenSubgraph>> {
    check_cap(
        "scan_forbidden_subgraphs",
        FORBIDDEN_SCAN_CAP,
        g.vertex_count(),
    )?;
    let mut hits = scan(
        g,
        &[4, 5],
        limit,
        |set, out| {
            if let Some(kind) = classify_forbidden(g, set) {
                out.push(ForbiddenSubgraph {
                    kind,
                    vertices: set.to_vec(),
                });
            }
        },
        |f: &ForbiddenSubgraph| f.kind,
    );
    hits.sort();
    Ok(hits)
}
