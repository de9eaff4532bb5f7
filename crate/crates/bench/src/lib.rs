//! Shared inputs for the criterion benches.

use pmas_core::{Rational, WeightedGraph};

/// A dominant-pair double-star with `leaves` leaves; every third leaf is
/// adjacent to both centers.
pub fn double_star(leaves: usize) -> WeightedGraph {
    let mut edges = Vec::with_capacity(2 * leaves + 1);
    for k in 0..leaves {
        let w = Rational::new(1 + (k % 7) as i64, 1 + (k % 3) as i64);
        match k % 3 {
            0 => edges.push((0, k + 2, w)),
            1 => edges.push((1, k + 2, w)),
            _ => {
                edges.push((0, k + 2, w.clone()));
                edges.push((1, k + 2, w));
            }
        }
    }
    edges.push((0, 1, Rational::from_integer(15)));
    WeightedGraph::from_weighted_edges(leaves + 2, edges).expect("valid double-star")
}
