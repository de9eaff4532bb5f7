//! Instance generators for the oracle harness.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, a portable
//! stream, so a seed names the same instance on every platform. Vertex
//! pairs are always visited in lexicographic index order.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::Rational;

/// Weight pool of the exhaustive sweep.
pub const EXHAUSTIVE_POOL: [(i64, i64); 2] = [(1, 1), (2, 1)];
/// Weight pool of the random sweep.
pub const RANDOM_POOL: [(i64, i64); 4] = [(1, 1), (3, 2), (2, 1), (3, 1)];

pub(crate) fn pool(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(p, q)| Rational::new(p, q)).collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// `G(n, p)` with weights drawn uniformly from `weight_pool`.
///
/// Each pair draws `k` uniform in `0..q` and is an edge when `k < p`
/// (with `p/q` the edge probability), then draws a pool index.
pub fn random_weighted_graph(
    n: usize,
    edge_probability: &Rational,
    weight_pool: &[Rational],
    seed: u64,
) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::Domain("need at least one vertex".into()));
    }
    if edge_probability.is_negative() || *edge_probability > 1 {
        return Err(Error::Domain(format!(
            "edge probability {edge_probability} is outside [0, 1]"
        )));
    }
    if weight_pool.is_empty() || weight_pool.iter().any(|w| !w.is_positive()) {
        return Err(Error::Domain(
            "weight pool must be nonempty and positive".into(),
        ));
    }
    let (num, den) = match (
        edge_probability.numer().to_u64(),
        edge_probability.denom().to_u64(),
    ) {
        (Some(p), Some(q)) => (p, q),
        _ => {
            return Err(Error::Domain(
                "edge probability denominator too large".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for (i, j) in pairs(n) {
        if rng.gen_range(0..den) < num {
            let w = weight_pool[rng.gen_range(0..weight_pool.len())].clone();
            edges.push((i, j, w));
        }
    }
    WeightedGraph::from_weighted_edges(n, edges)
}

/// Every graph on `n` vertices with weights from `weight_pool`.
///
/// Order: edge subsets by ascending bitmask over the lexicographic pair
/// list, then weight assignments as a base-`|pool|` counter whose least
/// significant digit is the first present edge. With `connected_only`,
/// subsets that leave the graph disconnected are skipped.
pub fn exhaustive_graphs(
    n: usize,
    weight_pool: &[Rational],
    connected_only: bool,
) -> impl Iterator<Item = WeightedGraph> + '_ {
    let subsets = 1u64 << pairs(n).len();
    (0..subsets)
        .filter(move |&mask| !connected_only || is_connected(n, &pairs_of(n, mask)))
        .flat_map(move |mask| {
            let present = pairs_of(n, mask);
            let k = present.len() as u32;
            let combos = (weight_pool.len() as u64).pow(k);
            (0..combos).map(move |mut code| {
                let edges = present.iter().map(|&(i, j)| {
                    let w = weight_pool[(code % weight_pool.len() as u64) as usize].clone();
                    code /= weight_pool.len() as u64;
                    (i, j, w)
                });
                WeightedGraph::from_weighted_edges(n, edges.collect::<Vec<_>>())
                    .expect("generated edges are valid")
            })
        })
}

fn pairs_of(n: usize, mask: u64) -> Vec<(usize, usize)> {
    pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, p)| p)
        .collect()
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut reached = 1u64;
    loop {
        let before = reached;
        for &(i, j) in edges {
            if reached >> i & 1 == 1 || reached >> j & 1 == 1 {
                reached |= 1 << i | 1 << j;
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}

fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(1..=20), rng.gen_range(1..=6))
}

/// A random dominant-pair double-star on `2..=max_n` vertices.
///
/// Leaves attach to one or both centers; weights are `p/q` with
/// `p in 1..=20`, `q in 1..=6`; the center edge gets `σ_u + σ_v` plus a
/// nonnegative slack (zero a quarter of the time, to exercise the boundary).
/// Labels are a random permutation of `1..=n`, so the centers are not
/// always the first vertices.
pub fn random_double_star(max_n: usize, seed: u64) -> Result<WeightedGraph> {
    if max_n < 2 {
        return Err(Error::Domain(
            "a double-star needs at least two vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let (u, v) = (perm[0], perm[1]);
    let mut edges = Vec::new();
    let mut sigma_u = Rational::zero();
    let mut sigma_v = Rational::zero();
    for &leaf in &perm[2..] {
        let side = rng.gen_range(0..3);
        if side != 1 {
            let w = random_weight(&mut rng);
            sigma_u = sigma_u.max(w.clone());
            edges.push((leaf, u, w));
        }
        if side != 0 {
            let w = random_weight(&mut rng);
            sigma_v = sigma_v.max(w.clone());
            edges.push((leaf, v, w));
        }
    }
    let slack = if rng.gen_range(0..4) == 0 {
        Rational::zero()
    } else {
        random_weight(&mut rng)
    };
    let mut center = &(&sigma_u + &sigma_v) + &slack;
    if center.is_zero() {
        center = random_weight(&mut rng);
    }
    edges.push((u, v, center));
    WeightedGraph::from_weighted_edges(n, edges)
}
