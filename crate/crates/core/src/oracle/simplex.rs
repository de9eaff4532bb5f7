//! Exact feasibility for `{ y : A y <= b }` with free `y`.
//!
//! Dictionary simplex over an exact ordered field. Slacks make every row an
//! equality; free variables are pivoted into the basis first and their rows
//! are then only carried along as definitions. What remains is a phase-1
//! problem over nonnegative variables, solved with a single artificial
//! variable. Pivot selection is Dantzig's rule, switching to Bland's rule
//! during degenerate stretches so the method always terminates.
//!
//! The field is generic so the hot path can run on `Ratio<i64>` with checked
//! arithmetic and fall back to `BigRational` when a value overflows.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait Field:
    Clone + PartialOrd + Zero + One + Signed + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv
{
    fn from_big(x: &BigRational) -> Result<Self, Overflow>;
    fn to_big(&self) -> BigRational;
}

impl Field for Ratio<i64> {
    fn from_big(x: &BigRational) -> Result<Self, Overflow> {
        let n = x.numer().to_i64().ok_or(Overflow)?;
        let d = x.denom().to_i64().ok_or(Overflow)?;
        Ok(Ratio::new_raw(n, d))
    }

    fn to_big(&self) -> BigRational {
        BigRational::new_raw(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn from_big(x: &BigRational) -> Result<Self, Overflow> {
        Ok(x.clone())
    }

    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

fn mul<T: Field>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

fn sub<T: Field>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_sub(b).ok_or(Overflow)
}

fn div<T: Field>(a: &T, b: &T) -> Result<T, Overflow> {
    a.checked_div(b).ok_or(Overflow)
}

/// One constraint `Σ coeffs · y <= rhs`, sparse.
#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub coeffs: Vec<(usize, BigRational)>,
    pub rhs: BigRational,
}

struct Tableau<T> {
    /// Row `i`: `x[basic[i]] + Σ_c t[i][c] · x[nonbasic[c]] = rhs[i]`.
    t: Vec<Vec<T>>,
    rhs: Vec<T>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Rows whose basic variable is free; they never limit a ratio test.
    free_row: Vec<bool>,
    num_free: usize,
}

impl<T: Field> Tableau<T> {
    fn is_free(&self, var: usize) -> bool {
        var < self.num_free
    }

    /// Pivots `nonbasic[c]` into the basis at row `r`, updating `obj` as well.
    fn pivot(
        &mut self,
        r: usize,
        c: usize,
        obj: Option<(&mut Vec<T>, &mut T)>,
    ) -> Result<(), Overflow> {
        let p = self.t[r][c].clone();
        let inv = div(&T::one(), &p)?;
        for (k, x) in self.t[r].iter_mut().enumerate() {
            *x = if k == c { inv.clone() } else { div(x, &p)? };
        }
        self.rhs[r] = div(&self.rhs[r], &p)?;
        let support: Vec<usize> = (0..self.t[r].len())
            .filter(|&k| k != c && !self.t[r][k].is_zero())
            .collect();
        let (pivot_row, pivot_rhs) = (self.t[r].clone(), self.rhs[r].clone());

        let eliminate = |row: &mut Vec<T>, rhs: &mut T| -> Result<(), Overflow> {
            let f = row[c].clone();
            if f.is_zero() {
                return Ok(());
            }
            for &k in &support {
                row[k] = sub(&row[k], &mul(&f, &pivot_row[k])?)?;
            }
            row[c] = mul(&-f.clone(), &pivot_row[c])?;
            *rhs = sub(rhs, &mul(&f, &pivot_rhs)?)?;
            Ok(())
        };
        for i in 0..self.t.len() {
            if i != r {
                let (row, rhs) = (&mut self.t[i], &mut self.rhs[i]);
                eliminate(row, rhs)?;
            }
        }
        if let Some((row, rhs)) = obj {
            eliminate(row, rhs)?;
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
        Ok(())
    }
}

/// Returns a feasible `y` (length `num_vars`), or `None` when the system is
/// infeasible. Every `coeffs` index must be below `num_vars`.
pub(crate) fn feasible_point<T: Field>(
    num_vars: usize,
    rows: &[Row],
) -> Result<Option<Vec<BigRational>>, Overflow> {
    let m = num_vars;
    let r = rows.len();
    let artificial = m + r;
    let mut t = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    for row in rows {
        let mut dense = vec![T::zero(); m + 1];
        for (j, a) in &row.coeffs {
            dense[*j] = T::from_big(a)?;
        }
        t.push(dense);
        rhs.push(T::from_big(&row.rhs)?);
    }
    let mut tab = Tableau {
        t,
        rhs,
        basic: (m..m + r).collect(),
        nonbasic: (0..m).chain([artificial]).collect(),
        free_row: vec![false; r],
        num_free: m,
    };

    // Phase 0: free variables into the basis.
    for c in 0..m {
        let pick = (0..r).find(|&i| !tab.free_row[i] && !tab.t[i][c].is_zero());
        if let Some(i) = pick {
            tab.pivot(i, c, None)?;
            tab.free_row[i] = true;
        }
    }

    let bounded_rows: Vec<usize> = (0..r).filter(|&i| !tab.free_row[i]).collect();
    let worst = bounded_rows
        .iter()
        .copied()
        .filter(|&i| tab.rhs[i].is_negative())
        .min_by(|&a, &b| {
            tab.rhs[a]
                .partial_cmp(&tab.rhs[b])
                .unwrap()
                .then(tab.basic[a].cmp(&tab.basic[b]))
        });

    if let Some(start) = worst {
        // Phase 1: relax every violated row by the artificial `a >= 0`,
        // then minimise `a`.
        let a_col = m;
        for &i in &bounded_rows {
            if tab.rhs[i].is_negative() {
                tab.t[i][a_col] = -T::one();
            }
        }
        tab.pivot(start, a_col, None)?;
        let mut obj = tab.t[start].clone();
        let mut obj_rhs = tab.rhs[start].clone();
        let mut degenerate_run = 0usize;

        while !obj_rhs.is_zero() {
            let bland = degenerate_run > 16;
            let eligible = |c: usize| !tab.is_free(tab.nonbasic[c]) && obj[c].is_positive();
            let entering = if bland {
                (0..=m)
                    .filter(|&c| eligible(c))
                    .min_by_key(|&c| tab.nonbasic[c])
            } else {
                (0..=m)
                    .filter(|&c| eligible(c))
                    .max_by(|&a, &b| obj[a].partial_cmp(&obj[b]).unwrap().then(b.cmp(&a)))
            };
            let Some(c) = entering else { break };

            let mut leave: Option<(usize, T)> = None;
            for &i in &bounded_rows {
                let coef = &tab.t[i][c];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = div(&tab.rhs[i], coef)?;
                let better = match &leave {
                    None => true,
                    Some((j, best)) => {
                        ratio < *best || (ratio == *best && tab.basic[i] < tab.basic[*j])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // The objective equals a nonnegative variable, so some row always limits it.
            let (row, ratio) = leave.expect("phase-1 objective is bounded below");
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            tab.pivot(row, c, Some((&mut obj, &mut obj_rhs)))?;
        }
        if !obj_rhs.is_zero() {
            return Ok(None);
        }
    }

    let mut values = vec![BigRational::zero(); m];
    for (i, &var) in tab.basic.iter().enumerate() {
        if var < m {
            values[var] = tab.rhs[i].to_big();
        }
    }
    Ok(Some(values))
}

/// Exact feasibility: `Ratio<i64>` first, `BigRational` on overflow.
pub(crate) fn solve(num_vars: usize, rows: &[Row]) -> Option<Vec<BigRational>> {
    match feasible_point::<Ratio<i64>>(num_vars, rows) {
        Ok(result) => result,
        Err(Overflow) => feasible_point::<BigRational>(num_vars, rows)
            .expect("arbitrary precision cannot overflow"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn row(coeffs: &[(usize, i64)], rhs: BigRational) -> Row {
        Row {
            coeffs: coeffs.iter().map(|&(j, a)| (j, q(a, 1))).collect(),
            rhs,
        }
    }

    fn satisfies(y: &[BigRational], rows: &[Row]) -> bool {
        rows.iter().all(|r| {
            let lhs: BigRational = r.coeffs.iter().map(|(j, a)| a * &y[*j]).sum();
            lhs <= r.rhs
        })
    }

    #[test]
    fn interval() {
        // 1 <= y <= 2
        let rows = vec![row(&[(0, 1)], q(2, 1)), row(&[(0, -1)], q(-1, 1))];
        let y = solve(1, &rows).unwrap();
        assert!(satisfies(&y, &rows));
    }

    #[test]
    fn empty_interval() {
        // 2 <= y <= 1
        let rows = vec![row(&[(0, 1)], q(1, 1)), row(&[(0, -1)], q(-2, 1))];
        assert!(solve(1, &rows).is_none());
    }

    #[test]
    fn needs_phase_one() {
        // y0 + y1 >= 3, y0 <= 1, y1 <= 1.5, y0 - y1 <= 0 → infeasible (max 2.5)
        let rows = vec![
            row(&[(0, -1), (1, -1)], q(-3, 1)),
            row(&[(0, 1)], q(1, 1)),
            row(&[(1, 1)], q(3, 2)),
            row(&[(0, 1), (1, -1)], q(0, 1)),
        ];
        assert!(solve(2, &rows).is_none());
        // Relax to y0 + y1 >= 5/2: exactly one point.
        let mut rows = rows;
        rows[0].rhs = q(-5, 2);
        let y = solve(2, &rows).unwrap();
        assert!(satisfies(&y, &rows));
        assert_eq!(y, vec![q(1, 1), q(3, 2)]);
    }

    #[test]
    fn overflow_falls_back_to_big_rationals() {
        let huge = BigRational::from_integer(BigInt::from(i64::MAX) * 4);
        let rows = vec![
            Row {
                coeffs: vec![(0, q(1, 1))],
                rhs: huge.clone(),
            },
            Row {
                coeffs: vec![(0, q(-1, 1))],
                rhs: -huge.clone(),
            },
        ];
        assert!(feasible_point::<Ratio<i64>>(1, &rows).is_err());
        let y = solve(1, &rows).unwrap();
        assert_eq!(y[0], huge);
    }

    #[test]
    fn unconstrained_variables() {
        let rows = vec![row(&[(1, 1)], q(-4, 1))];
        let y = solve(3, &rows).unwrap();
        assert!(satisfies(&y, &rows));
    }
}
