//! Textbook dense two-phase simplex on the explicit transportation LP, in
//! exact rational arithmetic. Shares nothing with the transportation kernel
//! beyond the input type; used to cross-check it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_scenario, EvalResult, LpStatus};
use crate::error::{Error, Result};
use crate::instance::Scenario;

type Q = BigRational;

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Q {
        &self.a[r][self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let p = self.a[pr][pc].clone();
        for x in self.a[pr].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.a[pr].clone();
        for (r, row) in self.a.iter_mut().enumerate() {
            if r == pr || row[pc].is_zero() {
                continue;
            }
            let f = row[pc].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[pr] = pc;
    }

    fn reduced_cost(&self, cost: &[Q], j: usize) -> Q {
        let mut r = cost[j].clone();
        for (row, &b) in self.a.iter().zip(&self.basis) {
            if !row[j].is_zero() && !cost[b].is_zero() {
                r -= &cost[b] * &row[j];
            }
        }
        r
    }

    /// Primal simplex with Bland's rule over columns `0..allowed`.
    fn optimize(&mut self, cost: &[Q], allowed: usize) {
        loop {
            let Some(enter) = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_negative())
            else {
                return;
            };
            let mut best: Option<(usize, Q)> = None;
            for r in 0..self.a.len() {
                let col = &self.a[r][enter];
                if !col.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / col;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bq)) => {
                        if ratio < bq || (ratio == bq && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bq))
                        }
                    }
                };
            }
            // transportation LPs are bounded, so some row always limits the step
            let (leave_row, _) = best.expect("bounded LP");
            self.pivot(leave_row, enter);
        }
    }

    fn objective(&self, cost: &[Q]) -> Q {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &b)| &cost[b] * self.rhs(r))
            .fold(Q::zero(), |a, b| a + b)
    }
}

/// Same contract as [`super::evaluate`], solved by a dense two-phase simplex.
/// The result carries no dual certificate.
pub fn evaluate_oracle(sc: &Scenario) -> Result<EvalResult> {
    check_scenario(sc)?;
    let (m, n) = (sc.m, sc.n);
    let n_x = m * n;
    let n_real = n_x + m; // flows + supply slacks
    let rows = m + n;
    let cols = n_real + rows; // + one artificial per row
    let q = |v: i64| Q::from_integer(BigInt::from(v));

    let mut a = vec![vec![Q::zero(); cols + 1]; rows];
    for i in 0..m {
        for j in 0..n {
            a[i][i * n + j] = Q::one();
        }
        a[i][n_x + i] = Q::one();
        a[i][cols] = q(sc.supply[i]);
    }
    for j in 0..n {
        for i in 0..m {
            a[m + j][i * n + j] = Q::one();
        }
        a[m + j][cols] = q(sc.demand[j]);
    }
    for (r, row) in a.iter_mut().enumerate() {
        row[n_real + r] = Q::one();
    }
    let mut t = Tableau {
        a,
        basis: (n_real..cols).collect(),
        cols,
    };

    // phase 1: minimize the sum of artificials
    let mut phase1 = vec![Q::zero(); cols];
    for c in phase1.iter_mut().skip(n_real) {
        *c = Q::one();
    }
    t.optimize(&phase1, cols);
    if t.objective(&phase1).is_positive() {
        return Ok(EvalResult::infeasible(m, n));
    }
    // drive zero-level artificials out where possible; rows that cannot be
    // pivoted are redundant and keep their artificial at zero
    for r in 0..rows {
        if t.basis[r] >= n_real {
            if let Some(c) = (0..n_real).find(|&c| !t.a[r][c].is_zero()) {
                t.pivot(r, c);
            }
        }
    }

    // phase 2: original costs, artificials may not re-enter
    let mut phase2 = vec![Q::zero(); cols];
    for i in 0..m {
        for j in 0..n {
            phase2[i * n + j] = q(sc.cost[i * n + j]);
        }
    }
    t.optimize(&phase2, n_real);

    let mut flow = vec![0i64; n_x];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n_x {
            flow[b] = to_int(t.rhs(r))?;
        }
    }
    let objective = to_int(&t.objective(&phase2))?;
    Ok(EvalResult {
        status: LpStatus::Optimal,
        objective: Some(objective),
        flow,
        duals: None,
        pivots: 0,
    })
}

fn to_int(v: &Q) -> Result<i64> {
    if !v.is_integer() {
        return Err(Error::Precondition(format!(
            "non-integral basic value {v} in transportation LP"
        )));
    }
    v.to_integer().to_i64().ok_or(Error::Overflow("oracle value"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_hand_examples() {
        let s = Scenario::new(vec![vec![2], vec![5]], vec![2, 4], vec![6]);
        assert_eq!(evaluate_oracle(&s).unwrap().objective, Some(24));
        let s = Scenario::new(vec![vec![2], vec![5]], vec![1, 4], vec![6]);
        assert_eq!(evaluate_oracle(&s).unwrap().status, LpStatus::Infeasible);
        let s = Scenario::new(vec![vec![3, 4]], vec![9], vec![0, 0]);
        assert_eq!(evaluate_oracle(&s).unwrap().objective, Some(0));
        let s = Scenario::new(vec![vec![3, 7, 2]], vec![20], vec![4, 1, 5]);
        assert_eq!(evaluate_oracle(&s).unwrap().objective, Some(29));
    }
}
