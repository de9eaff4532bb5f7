//! The characteristic function of the matching game.
//!
//! `γ(S)` is the maximum weight of a matching in `G[S]`. At desk scale it is
//! computed by an exact subset recursion: the lowest vertex of the remaining
//! set is either left unmatched or matched to one of its neighbours in the
//! set. Recognized double-stars use the closed form instead.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::characterization::DoubleStarWitness;
use crate::error::{check_cap, Error, Result};
use crate::graph::{induced_subgraph, Coalition, VertexId, WeightedGraph};
use crate::rational::Rational;

/// Largest graph accepted by [`max_weight_matching`].
pub const MATCHING_CAP: usize = 24;
/// Largest graph accepted by [`gamma_table`].
pub const TABLE_CAP: usize = 20;

/// A set of vertex-disjoint edges of the host graph, each stored with `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Matching {
    pub fn weight(&self, g: &WeightedGraph) -> Rational {
        self.edges
            .iter()
            .map(|&(u, v)| g.weight(u, v).cloned().unwrap_or_else(Rational::zero))
            .sum()
    }
}

trait DpValue: Clone + Ord {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
}

impl DpValue for i128 {
    fn zero() -> Self {
        0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

impl DpValue for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

/// Dense bitmask view of a graph with at most 32 vertices.
struct MaskGraph<T> {
    adj: Vec<u32>,
    weight: Vec<Vec<T>>,
}

impl<T: DpValue> MaskGraph<T> {
    fn new(g: &WeightedGraph, convert: impl Fn(&Rational) -> T) -> Self {
        let n = g.vertex_count();
        let mut adj = vec![0u32; n];
        let mut weight = vec![vec![T::zero(); n]; n];
        for e in g.edges() {
            let (u, v) = (e.u.index(), e.v.index());
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            let w = convert(&e.weight);
            weight[u][v] = w.clone();
            weight[v][u] = w;
        }
        MaskGraph { adj, weight }
    }

    fn best(&self, mask: u32, memo: &mut HashMap<u32, T>) -> T {
        if mask == 0 {
            return T::zero();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut best = self.best(rest, memo);
        let mut partners = self.adj[v] & rest;
        while partners != 0 {
            let u = partners.trailing_zeros() as usize;
            partners &= partners - 1;
            let cand = self.weight[v][u].plus(&self.best(rest & !(1 << u), memo));
            if cand > best {
                best = cand;
            }
        }
        memo.insert(mask, best.clone());
        best
    }

    /// Walks the memo back to one optimal matching; ties leave the lowest vertex unmatched.
    fn reconstruct(&self, mut mask: u32, memo: &mut HashMap<u32, T>) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        while mask != 0 {
            let v = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let target = self.best(mask, memo);
            if self.best(rest, memo) == target {
                mask = rest;
                continue;
            }
            let mut partners = self.adj[v] & rest;
            loop {
                let u = partners.trailing_zeros() as usize;
                partners &= partners - 1;
                let next = rest & !(1 << u);
                if self.weight[v][u].plus(&self.best(next, memo)) == target {
                    pairs.push((v, u));
                    mask = next;
                    break;
                }
            }
        }
        pairs
    }

    fn table(&self, n: usize) -> Vec<T> {
        let size = 1usize << n;
        let mut f: Vec<T> = Vec::with_capacity(size);
        f.push(T::zero());
        for mask in 1..size as u32 {
            let v = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let mut best = f[rest as usize].clone();
            let mut partners = self.adj[v] & rest;
            while partners != 0 {
                let u = partners.trailing_zeros() as usize;
                partners &= partners - 1;
                let cand = self.weight[v][u].plus(&f[(rest & !(1 << u)) as usize]);
                if cand > best {
                    best = cand;
                }
            }
            f.push(best);
        }
        f
    }
}

/// Common denominator of all weights, if the scaled total fits an `i128`.
fn integer_scale(g: &WeightedGraph) -> Option<BigInt> {
    let mut lcm = BigInt::one();
    for e in g.edges() {
        lcm = lcm.lcm(e.weight.denom());
    }
    let mut total = BigInt::zero();
    for e in g.edges() {
        total += e.weight.numer() * (&lcm / e.weight.denom());
    }
    total.to_i128()?;
    Some(lcm)
}

fn scaled_int(w: &Rational, scale: &BigInt) -> i128 {
    (w.numer() * (scale / w.denom()))
        .to_i128()
        .expect("total weight checked to fit")
}

fn unscale(x: i128, scale: &BigInt) -> Rational {
    Rational::from_big(BigRational::new(BigInt::from(x), scale.clone()))
}

fn matching_of<T: DpValue>(g: &WeightedGraph, mg: &MaskGraph<T>) -> (Matching, T) {
    let full = if g.vertex_count() == 0 {
        0
    } else {
        u32::MAX >> (32 - g.vertex_count())
    };
    let mut memo = HashMap::new();
    let value = mg.best(full, &mut memo);
    let edges = mg
        .reconstruct(full, &mut memo)
        .into_iter()
        .map(|(a, b)| (VertexId::new(a.min(b)), VertexId::new(a.max(b))))
        .collect();
    (Matching { edges }, value)
}

/// A maximum-weight matching of `g` and its weight. Exact, for at most
/// [`MATCHING_CAP`] vertices.
pub fn max_weight_matching(g: &WeightedGraph) -> Result<(Matching, Rational)> {
    check_cap("max_weight_matching", MATCHING_CAP, g.vertex_count())?;
    match integer_scale(g) {
        Some(scale) => {
            let mg = MaskGraph::new(g, |w| scaled_int(w, &scale));
            let (m, value) = matching_of(g, &mg);
            Ok((m, unscale(value, &scale)))
        }
        None => {
            let mg = MaskGraph::new(g, Rational::clone);
            Ok(matching_of(g, &mg))
        }
    }
}

/// `γ(S)`: the maximum matching weight of `G[S]`.
pub fn characteristic_value(g: &WeightedGraph, s: &Coalition) -> Result<Rational> {
    g.check_coalition(s)?;
    check_cap("characteristic_value", MATCHING_CAP, s.len())?;
    if s.len() < 2 {
        return Ok(Rational::zero());
    }
    let sub = induced_subgraph(g, s)?;
    Ok(max_weight_matching(&sub)?.1)
}

/// `γ` on every coalition of a graph with at most [`TABLE_CAP`] vertices,
/// indexed by bitmask.
#[derive(Clone, Debug)]
pub struct GammaTable {
    graph: WeightedGraph,
    values: Vec<Rational>,
}

impl GammaTable {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn by_mask(&self, mask: u32) -> &Rational {
        &self.values[mask as usize]
    }

    pub fn value(&self, s: &Coalition) -> Result<&Rational> {
        self.graph.check_coalition(s)?;
        let mask = s.to_mask().expect("table graphs have at most 20 vertices");
        Ok(&self.values[mask as usize])
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

pub fn gamma_table(g: &WeightedGraph) -> Result<GammaTable> {
    check_cap("gamma_table", TABLE_CAP, g.vertex_count())?;
    let n = g.vertex_count();
    let values = match integer_scale(g) {
        Some(scale) => {
            let mg = MaskGraph::new(g, |w| scaled_int(w, &scale));
            mg.table(n)
                .into_iter()
                .map(|x| unscale(x, &scale))
                .collect()
        }
        None => MaskGraph::new(g, Rational::clone).table(n),
    };
    Ok(GammaTable {
        graph: g.clone(),
        values,
    })
}

/// Closed-form `γ(S)` on a component recognized as a dominant-pair
/// double-star: `w_uv` with both centers present, `σ_i(S)` with only center
/// `i`, and 0 without centers.
pub fn double_star_gamma(witness: &DoubleStarWitness, s: &Coalition) -> Result<Rational> {
    witness.validate()?;
    if !s.is_subset(&witness.component) {
        return Err(Error::Domain(
            "coalition is not contained in the witness component".into(),
        ));
    }
    Ok(witness.gamma_within(s))
}
