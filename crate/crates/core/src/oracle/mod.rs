//! Ground truth for small games: PMAS existence as an exact linear
//! feasibility problem, independent of the structural characterization.
//!
//! Variables are the payoffs `x_{S,i}` for every nonempty `S` and `i ∈ S`,
//! free in sign. Constraints are efficiency `Σ_{i∈S} x_{S,i} = γ(S)` and
//! monotonicity `x_{S,i} <= x_{S∪{j},i}` on cover pairs only (longer chains
//! follow by transitivity).

mod generate;
mod harness;
mod simplex;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

pub use generate::{
    exhaustive_graphs, random_double_star, random_weighted_graph, EXHAUSTIVE_POOL, RANDOM_POOL,
};
pub use harness::{
    constructor_harness, equivalence_harness, ConstructorReport, HarnessReport, SweepStats,
};

use crate::error::{check_cap, Result};
use crate::graph::{Coalition, WeightedGraph};
use crate::matching::{gamma_table, GammaTable};
use crate::pmas::{Allocation, SchemeTable};
use crate::rational::Rational;

pub const ORACLE_CAP: usize = 7;

/// The PMAS conditions written out as a linear system.
#[derive(Clone, Debug)]
pub struct FeasibilitySystem {
    n: usize,
    /// First variable index of each coalition's block, by mask.
    offset: Vec<usize>,
    /// `(coalition mask, player)` for every variable.
    pub variables: Vec<(u32, usize)>,
    /// `Σ_{i∈S} x_{S,i} = value`, one per nonempty coalition.
    pub equalities: Vec<(u32, Rational)>,
    /// `x[small] <= x[large]`, variable indices.
    pub monotonicity: Vec<(usize, usize)>,
}

impl FeasibilitySystem {
    pub fn build(gamma: &GammaTable) -> Self {
        let n = gamma.vertex_count();
        let full = 1u32 << n;
        let mut offset = vec![0; full as usize];
        let mut variables = Vec::with_capacity(n << n.saturating_sub(1));
        for mask in 1..full {
            offset[mask as usize] = variables.len();
            variables.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| (mask, i)));
        }
        let equalities = (1..full).map(|m| (m, gamma.by_mask(m).clone())).collect();
        let mut sys = FeasibilitySystem {
            n,
            offset,
            variables,
            equalities,
            monotonicity: Vec::new(),
        };
        for mask in 1..full {
            for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                    let pair = (sys.var(mask, i), sys.var(mask | 1 << j, i));
                    sys.monotonicity.push(pair);
                }
            }
        }
        sys
    }

    pub fn player_count(&self) -> usize {
        self.n
    }

    /// Index of `x_{S,i}`; `i` must be in `S`.
    pub fn var(&self, mask: u32, i: usize) -> usize {
        self.offset[mask as usize] + (mask & ((1u32 << i) - 1)).count_ones() as usize
    }

    /// Eliminates each coalition's lowest member through its efficiency
    /// equation and returns the remaining inequalities over the free
    /// variables, plus the affine map back to the original variables.
    fn reduce(&self) -> (usize, Vec<simplex::Row>, Vec<Affine>) {
        let mut free_index = vec![usize::MAX; self.variables.len()];
        let mut num_free = 0;
        for (k, &(mask, i)) in self.variables.iter().enumerate() {
            if i != mask.trailing_zeros() as usize {
                free_index[k] = num_free;
                num_free += 1;
            }
        }
        let affine: Vec<Affine> = self
            .variables
            .iter()
            .enumerate()
            .map(|(k, &(mask, i))| {
                if free_index[k] != usize::MAX {
                    return Affine {
                        constant: BigRational::zero(),
                        terms: vec![(free_index[k], BigRational::from_integer(1.into()))],
                    };
                }
                let constant = self.equalities[mask as usize - 1].1.as_big().clone();
                let terms = (0..self.n)
                    .filter(|&p| p != i && mask >> p & 1 == 1)
                    .map(|p| {
                        (
                            free_index[self.var(mask, p)],
                            BigRational::from_integer((-1).into()),
                        )
                    })
                    .collect();
                Affine { constant, terms }
            })
            .collect();

        let mut rows = Vec::with_capacity(self.monotonicity.len());
        for &(small, large) in &self.monotonicity {
            // small - large <= 0
            let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
            for (j, a) in &affine[small].terms {
                *coeffs.entry(*j).or_insert_with(BigRational::zero) += a;
            }
            for (j, a) in &affine[large].terms {
                *coeffs.entry(*j).or_insert_with(BigRational::zero) -= a;
            }
            coeffs.retain(|_, a| !a.is_zero());
            let rhs = &affine[large].constant - &affine[small].constant;
            rows.push(simplex::Row {
                coeffs: coeffs.into_iter().collect(),
                rhs,
            });
        }
        (num_free, rows, affine)
    }
}

struct Affine {
    constant: BigRational,
    terms: Vec<(usize, BigRational)>,
}

impl Affine {
    fn eval(&self, y: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (j, a)| acc + a * &y[*j])
    }
}

/// Verdict of the exact oracle; `scheme` is present iff the game is feasible.
#[derive(Clone, Debug)]
pub struct Feasibility {
    pub feasible: bool,
    pub scheme: Option<SchemeTable>,
}

/// Decides PMAS existence exactly for graphs with at most [`ORACLE_CAP`] vertices.
pub fn pmas_feasibility(g: &WeightedGraph) -> Result<Feasibility> {
    check_cap("pmas_feasibility", ORACLE_CAP, g.vertex_count())?;
    let gamma = gamma_table(g)?;
    let system = FeasibilitySystem::build(&gamma);
    let (num_free, mut rows, affine) = system.reduce();

    // Constant rows decide themselves.
    if rows
        .iter()
        .any(|r| r.coeffs.is_empty() && r.rhs < BigRational::zero())
    {
        return Ok(Feasibility {
            feasible: false,
            scheme: None,
        });
    }
    rows.retain(|r| !r.coeffs.is_empty());

    let Some(y) = simplex::solve(num_free, &rows) else {
        return Ok(Feasibility {
            feasible: false,
            scheme: None,
        });
    };
    let n = g.vertex_count();
    let mut table = SchemeTable::empty(n)?;
    for mask in 1..1u32 << n {
        let payoff = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| Rational::from_big(affine[system.var(mask, i)].eval(&y)))
            .collect();
        table.set(Allocation::new(Coalition::from_mask(mask as u64), payoff)?)?;
    }
    Ok(Feasibility {
        feasible: true,
        scheme: Some(table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::pmas::{verify_scheme, AllocationScheme};

    fn feasible(text: &str) -> bool {
        let g = parse_graph(text).unwrap();
        let f = pmas_feasibility(&g).unwrap();
        if let Some(s) = &f.scheme {
            let report = verify_scheme(&g, &AllocationScheme::Table(s.clone())).unwrap();
            assert!(
                report.passed(),
                "oracle scheme fails: {:?}",
                report.violation
            );
        }
        f.feasible
    }

    #[test]
    fn system_sizes() {
        for n in 1..=5usize {
            let text: String = (1..=n).map(|i| format!("{i}\n")).collect();
            let g = parse_graph(&text).unwrap();
            let sys = FeasibilitySystem::build(&gamma_table(&g).unwrap());
            assert_eq!(sys.variables.len(), n << (n - 1));
            assert_eq!(sys.equalities.len(), (1 << n) - 1);
            if n >= 2 {
                assert_eq!(sys.monotonicity.len(), (n * (n - 1)) << (n - 2));
            }
        }
    }

    #[test]
    fn triangle_boundary() {
        assert!(feasible("1 2 1\n1 3 1\n2 3 2"));
        assert!(!feasible("1 2 1\n1 3 1\n2 3 3/2"));
    }

    #[test]
    fn edgeless_graph_is_feasible_with_zeros() {
        let g = parse_graph("1\n2\n3").unwrap();
        let f = pmas_feasibility(&g).unwrap();
        assert!(f.feasible);
        let t = f.scheme.unwrap();
        for mask in 1..8u32 {
            assert!(t.row(mask).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn small_cases_match_hand_analysis() {
        assert!(feasible("1 2 1\n2 3 3\n3 4 1"));
        assert!(!feasible("1 2 1\n2 3 1\n3 4 1"));
        assert!(!feasible("1 2 1\n2 3 1\n3 4 1\n4 1 1"));
        assert!(feasible("1 2 5"));
        assert!(feasible("h a 1\nh b 1\nh c 1"));
    }

    #[test]
    fn cap() {
        let text: String = (1..=8).map(|i| format!("{i}\n")).collect();
        assert!(pmas_feasibility(&parse_graph(&text).unwrap()).is_err());
    }
}
