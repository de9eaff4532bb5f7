//! Population monotonic allocation schemes: the explicit construction for
//! dominant-pair double-stars, an exact verifier and the core test.
//!
//! On a double-star with centers `u, v`, leaves always get 0. A coalition
//! holding one center `i` pays it `σ_i(S)`, the heaviest edge from `i` into
//! `S`. A coalition holding both splits `w_uv` in proportion `σ_u : σ_v`
//! (global σ of the component), or equally when both are 0.

use std::cmp::Ordering;

use crate::characterization::{decide_population_monotonic, DoubleStarWitness, PmDecision};
use crate::error::{check_cap, Error, Result};
use crate::graph::{Coalition, VertexId, WeightedGraph};
use crate::matching::{gamma_table, TABLE_CAP};
use crate::rational::Rational;

/// Payoffs for the members of one coalition, aligned with `coalition.members()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    coalition: Coalition,
    payoff: Vec<Rational>,
}

impl Allocation {
    pub fn new(coalition: Coalition, payoff: Vec<Rational>) -> Result<Self> {
        if coalition.len() != payoff.len() {
            return Err(Error::Domain(format!(
                "allocation has {} payoffs for {} members",
                payoff.len(),
                coalition.len()
            )));
        }
        Ok(Allocation { coalition, payoff })
    }

    pub fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    pub fn payoffs(&self) -> &[Rational] {
        &self.payoff
    }

    pub fn get(&self, v: VertexId) -> Option<&Rational> {
        self.coalition
            .members()
            .binary_search(&v)
            .ok()
            .map(|i| &self.payoff[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Rational)> {
        self.coalition.iter().zip(self.payoff.iter())
    }

    pub fn total(&self) -> Rational {
        self.payoff.iter().sum()
    }

    pub fn scaled(&self, factor: &Rational) -> Allocation {
        Allocation {
            coalition: self.coalition.clone(),
            payoff: self.payoff.iter().map(|x| x * factor).collect(),
        }
    }
}

/// Heaviest edge of `G[S] - excluded` at `i`; 0 if there is none.
pub fn local_sigma(
    g: &WeightedGraph,
    i: VertexId,
    s: &Coalition,
    excluded: (VertexId, VertexId),
) -> Result<Rational> {
    g.check_coalition(s)?;
    if !s.contains(i) {
        return Err(Error::Domain(
            "player is not a member of the coalition".into(),
        ));
    }
    let is_excluded = |x: VertexId| (i, x) == excluded || (x, i) == excluded;
    Ok(g.neighbors(i)
        .iter()
        .filter(|(x, _)| s.contains(*x) && !is_excluded(*x))
        .map(|(_, w)| w)
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero))
}

fn allocate_unchecked(witness: &DoubleStarWitness, s: &Coalition) -> Vec<Rational> {
    let has_u = s.contains(witness.u);
    let has_v = witness.v.is_some_and(|v| s.contains(v));
    let (pay_u, pay_v) = match (has_u, has_v) {
        (true, true) => {
            let total = &witness.sigma_u + &witness.sigma_v;
            if total.is_zero() {
                let half = &witness.center_weight / &Rational::from(2);
                (half.clone(), half)
            } else {
                let w = &witness.center_weight;
                (w * &witness.sigma_u / &total, w * &witness.sigma_v / &total)
            }
        }
        (true, false) => (witness.local_sigma(witness.u, s), Rational::zero()),
        (false, true) => (Rational::zero(), witness.local_sigma(witness.v.unwrap(), s)),
        (false, false) => (Rational::zero(), Rational::zero()),
    };
    s.iter()
        .map(|x| {
            if x == witness.u {
                pay_u.clone()
            } else if Some(x) == witness.v {
                pay_v.clone()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// The scheme's row for a nonempty coalition inside the witness component.
pub fn allocate(witness: &DoubleStarWitness, s: &Coalition) -> Result<Allocation> {
    witness.validate()?;
    if s.is_empty() {
        return Err(Error::Domain(
            "allocations are defined for nonempty coalitions".into(),
        ));
    }
    if !s.is_subset(&witness.component) {
        return Err(Error::Domain(
            "coalition leaves the witness component".into(),
        ));
    }
    Allocation::new(s.clone(), allocate_unchecked(witness, s))
}

/// The constructive PMAS as a pure function of the coalition; works at any size.
#[derive(Clone, Debug)]
pub struct PmasRule {
    witnesses: Vec<DoubleStarWitness>,
    owner: Vec<usize>,
}

impl PmasRule {
    /// Fails with the certificate when the game is not population monotonic.
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        Self::from_decision(g, decide_population_monotonic(g))
    }

    pub fn from_decision(g: &WeightedGraph, decision: PmDecision) -> Result<Self> {
        if !decision.population_monotonic {
            return Err(Error::NotPopulationMonotonic(Box::new(decision)));
        }
        let mut owner = vec![usize::MAX; g.vertex_count()];
        for (k, w) in decision.witnesses.iter().enumerate() {
            w.validate()?;
            for v in w.component.iter() {
                owner[v.index()] = k;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::Domain("witnesses do not cover every vertex".into()));
        }
        Ok(PmasRule {
            witnesses: decision.witnesses,
            owner,
        })
    }

    pub fn witnesses(&self) -> &[DoubleStarWitness] {
        &self.witnesses
    }

    pub fn allocation(&self, s: &Coalition) -> Result<Allocation> {
        if s.is_empty() {
            return Err(Error::Domain(
                "allocations are defined for nonempty coalitions".into(),
            ));
        }
        if let Some(v) = s.iter().find(|v| v.index() >= self.owner.len()) {
            return Err(Error::Domain(format!(
                "vertex index {} is not in the graph",
                v.index()
            )));
        }
        let mut payoff = vec![Rational::zero(); s.len()];
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (pos, v) in s.iter().enumerate() {
            let k = self.owner[v.index()];
            match groups.iter_mut().find(|(owner, _)| *owner == k) {
                Some((_, positions)) => positions.push(pos),
                None => groups.push((k, vec![pos])),
            }
        }
        for (k, positions) in groups {
            let part = Coalition::new(positions.iter().map(|&p| s.members()[p]));
            for (p, x) in positions
                .iter()
                .zip(allocate_unchecked(&self.witnesses[k], &part))
            {
                payoff[*p] = x;
            }
        }
        Allocation::new(s.clone(), payoff)
    }
}

/// Rows indexed by coalition bitmask; row 0 (the empty coalition) is unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeTable {
    n: usize,
    rows: Vec<Option<Vec<Rational>>>,
}

impl SchemeTable {
    pub fn empty(n: usize) -> Result<Self> {
        check_cap("scheme table", TABLE_CAP, n)?;
        Ok(SchemeTable {
            n,
            rows: vec![None; 1 << n],
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, allocation: Allocation) -> Result<()> {
        let mask = allocation
            .coalition
            .to_mask()
            .filter(|&m| m != 0 && (m as usize) < self.rows.len())
            .ok_or_else(|| Error::Domain("coalition outside the table".into()))?;
        self.rows[mask as usize] = Some(allocation.payoff);
        Ok(())
    }

    pub fn row(&self, mask: u32) -> Option<&[Rational]> {
        self.rows.get(mask as usize).and_then(|r| r.as_deref())
    }

    pub fn row_mut(&mut self, mask: u32) -> Option<&mut Vec<Rational>> {
        self.rows.get_mut(mask as usize).and_then(|r| r.as_mut())
    }

    pub fn allocation(&self, mask: u32) -> Option<Allocation> {
        let payoff = self.row(mask)?.to_vec();
        Some(Allocation {
            coalition: Coalition::from_mask(mask as u64),
            payoff,
        })
    }

    /// Payoff of `player` in the row for `mask`.
    fn payoff(&self, mask: u32, player: usize) -> &Rational {
        let row = self.rows[mask as usize].as_ref().expect("checked complete");
        let pos = (mask & ((1u32 << player) - 1)).count_ones() as usize;
        &row[pos]
    }

    fn check_complete(&self) -> Result<()> {
        for mask in 1..self.rows.len() as u32 {
            match &self.rows[mask as usize] {
                None => {
                    return Err(Error::IncompleteScheme(format!(
                        "missing row for coalition {:?}",
                        member_indices(mask)
                    )))
                }
                Some(row) if row.len() != mask.count_ones() as usize => {
                    return Err(Error::IncompleteScheme(format!(
                        "row for {:?} has {} payoffs",
                        member_indices(mask),
                        row.len()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn member_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Nonempty masks over `n` players by size, then lexicographically by members.
pub fn canonical_masks(n: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (1..1u32 << n).collect();
    masks.sort_by(|&a, &b| {
        a.count_ones().cmp(&b.count_ones()).then_with(|| {
            if a == b {
                Ordering::Equal
            } else {
                let low = (a ^ b) & (a ^ b).wrapping_neg();
                if a & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        })
    });
    masks
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeMode {
    Materialized,
    Lazy,
}

#[derive(Clone, Debug)]
pub enum AllocationScheme {
    Table(SchemeTable),
    Rule(PmasRule),
}

impl AllocationScheme {
    pub fn allocation(&self, s: &Coalition) -> Result<Allocation> {
        match self {
            AllocationScheme::Rule(rule) => rule.allocation(s),
            AllocationScheme::Table(table) => {
                let mask = s
                    .to_mask()
                    .filter(|&m| m != 0 && (m as usize) < table.rows.len())
                    .ok_or_else(|| Error::Domain("coalition outside the table".into()))?;
                table.allocation(mask as u32).ok_or_else(|| {
                    Error::IncompleteScheme(format!(
                        "missing row for {:?}",
                        member_indices(mask as u32)
                    ))
                })
            }
        }
    }

    /// Materializes every row for a graph on `n` vertices.
    pub fn to_table(&self, n: usize) -> Result<SchemeTable> {
        match self {
            AllocationScheme::Table(t) => {
                if t.n != n {
                    return Err(Error::Domain(format!(
                        "scheme covers {} players, graph has {n}",
                        t.n
                    )));
                }
                Ok(t.clone())
            }
            AllocationScheme::Rule(rule) => {
                let mut table = SchemeTable::empty(n)?;
                for mask in 1..1u32 << n {
                    table.set(rule.allocation(&Coalition::from_mask(mask as u64))?)?;
                }
                Ok(table)
            }
        }
    }
}

/// Builds the constructive PMAS, or fails with the certificate when none exists.
pub fn construct_scheme(g: &WeightedGraph, mode: SchemeMode) -> Result<AllocationScheme> {
    let rule = PmasRule::new(g)?;
    match mode {
        SchemeMode::Lazy => Ok(AllocationScheme::Rule(rule)),
        SchemeMode::Materialized => {
            check_cap("materialized scheme", TABLE_CAP, g.vertex_count())?;
            Ok(AllocationScheme::Table(
                AllocationScheme::Rule(rule).to_table(g.vertex_count())?,
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeViolation {
    Efficiency {
        coalition: Coalition,
        total: Rational,
        gamma: Rational,
    },
    Monotonicity {
        smaller: Coalition,
        larger: Coalition,
        player: VertexId,
        before: Rational,
        after: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub violation: Option<SchemeViolation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks efficiency on every row, then monotonicity on every cover pair
/// `S ⊂ S ∪ {j}`, both in canonical coalition order. Nested pairs follow
/// from cover pairs by chaining.
pub fn verify_scheme(g: &WeightedGraph, scheme: &AllocationScheme) -> Result<VerifyReport> {
    let n = g.vertex_count();
    check_cap("verify_scheme", TABLE_CAP, n)?;
    let table = scheme.to_table(n)?;
    table.check_complete()?;
    let gamma = gamma_table(g)?;
    let order = canonical_masks(n);

    for &mask in &order {
        let total: Rational = table.row(mask).unwrap().iter().sum();
        let value = gamma.by_mask(mask);
        if total != *value {
            return Ok(VerifyReport {
                violation: Some(SchemeViolation::Efficiency {
                    coalition: Coalition::from_mask(mask as u64),
                    total,
                    gamma: value.clone(),
                }),
            });
        }
    }
    for &mask in &order {
        for j in (0..n).filter(|j| mask >> j & 1 == 0) {
            let larger = mask | 1 << j;
            for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                let before = table.payoff(mask, i);
                let after = table.payoff(larger, i);
                if before > after {
                    return Ok(VerifyReport {
                        violation: Some(SchemeViolation::Monotonicity {
                            smaller: Coalition::from_mask(mask as u64),
                            larger: Coalition::from_mask(larger as u64),
                            player: VertexId::new(i),
                            before: before.clone(),
                            after: after.clone(),
                        }),
                    });
                }
            }
        }
    }
    Ok(VerifyReport { violation: None })
}

/// Efficiency on `N` plus coalitional rationality on every `S ⊆ N`.
pub fn is_core_allocation(g: &WeightedGraph, x: &Allocation) -> Result<bool> {
    if *x.coalition() != g.all() {
        return Err(Error::Domain(
            "a core allocation must cover every player".into(),
        ));
    }
    let gamma = gamma_table(g)?;
    let n = g.vertex_count();
    let full = ((1u64 << n) - 1) as u32;
    if x.total() != *gamma.by_mask(full) {
        return Ok(false);
    }
    for mask in 1..full {
        let share: Rational = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &x.payoffs()[i])
            .sum();
        if share < *gamma.by_mask(mask) {
            return Ok(false);
        }
    }
    Ok(true)
}
