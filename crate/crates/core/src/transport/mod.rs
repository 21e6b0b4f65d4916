//! Optimal value of a single transportation scenario.
//!
//! The scenario `min c.x  s.t.  sum_j x_ij <= s_i,  sum_i x_ij = d_j,  x >= 0`
//! is balanced by a zero-cost dummy destination absorbing `sum(s) - sum(d)`
//! and then solved by the transportation simplex: northwest-corner start,
//! u-v (MODI) pricing and stepping-stone pivots. Pivoting follows Bland's
//! rule (lowest-index entering cell, lowest-index leaving cell on ratio ties)
//! so degenerate bases cannot cycle. All arithmetic is exact `i64`.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Node potentials of the final basis.
///
/// `u[i]` belongs to source `i`, `v[j]` to destination `j`, and `v_dummy` to
/// the slack destination. Reduced cost of cell `(i, j)` is `c_ij - u_i - v_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Duals {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub v_dummy: i64,
}

impl Duals {
    /// Checks that these potentials prove `flow` optimal for `sc`: dual
    /// feasibility (non-negative reduced costs, including the slack column),
    /// complementary slackness, and equal primal and dual objectives.
    pub fn certifies(&self, sc: &Scenario, flow: &[i64], objective: i64) -> bool {
        let (m, n) = (sc.m, sc.n);
        if self.u.len() != m || self.v.len() != n || flow.len() != m * n {
            return false;
        }
        let surplus = sc.total_supply() - sc.total_demand();
        let mut dual_obj: i128 = self.v_dummy as i128 * surplus as i128;
        for i in 0..m {
            dual_obj += self.u[i] as i128 * sc.supply[i] as i128;
            let shipped: i64 = flow[i * n..(i + 1) * n].iter().sum();
            let slack_rc = -self.u[i] - self.v_dummy;
            if slack_rc < 0 || (sc.supply[i] > shipped && slack_rc != 0) {
                return false;
            }
            for j in 0..n {
                let rc = sc.cost[i * n + j] - self.u[i] - self.v[j];
                if rc < 0 || (flow[i * n + j] > 0 && rc != 0) {
                    return false;
                }
            }
        }
        for j in 0..n {
            dual_obj += self.v[j] as i128 * sc.demand[j] as i128;
        }
        dual_obj == objective as i128
    }
}

/// Result of evaluating one scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    pub status: LpStatus,
    /// `None` iff the scenario is infeasible.
    pub objective: Option<i64>,
    /// Row-major `m x n` optimal flow; all zeros when infeasible.
    pub flow: Vec<i64>,
    /// Optimality certificate; absent for infeasible scenarios and for the oracle.
    pub duals: Option<Duals>,
    /// Simplex pivots performed.
    pub pivots: usize,
}

impl EvalResult {
    fn infeasible(m: usize, n: usize) -> Self {
        Self {
            status: LpStatus::Infeasible,
            objective: None,
            flow: vec![0; m * n],
            duals: None,
            pivots: 0,
        }
    }
}

/// Solves the scenario with the transportation simplex.
pub fn evaluate(sc: &Scenario) -> Result<EvalResult> {
    check_scenario(sc)?;
    let total_s = checked_sum(&sc.supply, "total supply")?;
    let total_d = checked_sum(&sc.demand, "total demand")?;
    if total_s < total_d {
        return Ok(EvalResult::infeasible(sc.m, sc.n));
    }
    let result = TransportTableau::new(sc, total_s - total_d).solve()?;
    debug_assert!(result
        .duals
        .as_ref()
        .is_some_and(|d| d.certifies(sc, &result.flow, result.objective.unwrap())));
    Ok(result)
}

pub(crate) fn check_scenario(sc: &Scenario) -> Result<()> {
    if sc.supply.len() != sc.m || sc.demand.len() != sc.n || sc.cost.len() != sc.m * sc.n {
        return Err(Error::DimensionMismatch(format!(
            "scenario declares {}x{} but has {} supplies, {} demands, {} costs",
            sc.m,
            sc.n,
            sc.supply.len(),
            sc.demand.len(),
            sc.cost.len()
        )));
    }
    if sc.m == 0 || sc.n == 0 {
        return Err(Error::DimensionMismatch("scenario must be at least 1x1".into()));
    }
    if let Some(v) = sc
        .supply
        .iter()
        .chain(&sc.demand)
        .chain(&sc.cost)
        .find(|&&v| v < 0)
    {
        return Err(Error::NegativeData(format!("value {v} in scenario")));
    }
    Ok(())
}

fn checked_sum(v: &[i64], what: &'static str) -> Result<i64> {
    v.iter()
        .try_fold(0i64, |a, &b| a.checked_add(b))
        .ok_or(Error::Overflow(what))
}

/// Balanced `m x (n+1)` tableau; the last column is the dummy destination.
struct TransportTableau<'a> {
    sc: &'a Scenario,
    rows: usize,
    cols: usize,
    flow: Vec<i64>,
    is_basic: Vec<bool>,
    basis: Vec<usize>,
    // scratch space reused across pivots
    u: Vec<i64>,
    v: Vec<i64>,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
}

impl<'a> TransportTableau<'a> {
    fn new(sc: &'a Scenario, surplus: i64) -> Self {
        let rows = sc.m;
        let cols = sc.n + 1;
        let mut tab = Self {
            sc,
            rows,
            cols,
            flow: vec![0; rows * cols],
            is_basic: vec![false; rows * cols],
            basis: Vec::with_capacity(rows + cols - 1),
            u: vec![0; rows],
            v: vec![0; cols],
            row_adj: vec![Vec::new(); rows],
            col_adj: vec![Vec::new(); cols],
        };
        tab.northwest_corner(surplus);
        tab
    }

    fn cost(&self, cell: usize) -> i64 {
        let (i, j) = (cell / self.cols, cell % self.cols);
        if j == self.sc.n {
            0
        } else {
            self.sc.cost[i * self.sc.n + j]
        }
    }

    /// Staircase start. When a row and a column are exhausted together the
    /// walk moves down, so the next cell enters the basis at zero level and
    /// the basis stays a spanning tree of `rows + cols - 1` cells.
    fn northwest_corner(&mut self, surplus: i64) {
        let mut supply = self.sc.supply.clone();
        let mut demand = self.sc.demand.clone();
        demand.push(surplus);
        let (mut i, mut j) = (0, 0);
        while j < self.cols {
            let x = supply[i].min(demand[j]);
            let cell = i * self.cols + j;
            self.flow[cell] = x;
            self.is_basic[cell] = true;
            self.basis.push(cell);
            supply[i] -= x;
            demand[j] -= x;
            if supply[i] == 0 && i + 1 < self.rows {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(self.basis.len(), self.rows + self.cols - 1);
    }

    fn rebuild_adjacency(&mut self) {
        self.row_adj.iter_mut().for_each(Vec::clear);
        self.col_adj.iter_mut().for_each(Vec::clear);
        for &cell in &self.basis {
            self.row_adj[cell / self.cols].push(cell);
            self.col_adj[cell % self.cols].push(cell);
        }
    }

    /// Solves `c_ij = u_i + v_j` on basic cells with `u_0 = 0`.
    fn compute_potentials(&mut self) -> Result<()> {
        let mut row_done = vec![false; self.rows];
        let mut col_done = vec![false; self.cols];
        // node ids: rows are 0..rows, columns are rows..rows+cols
        let mut stack = vec![0usize];
        self.u[0] = 0;
        row_done[0] = true;
        while let Some(node) = stack.pop() {
            if node < self.rows {
                let i = node;
                for k in 0..self.row_adj[i].len() {
                    let cell = self.row_adj[i][k];
                    let j = cell % self.cols;
                    if !col_done[j] {
                        self.v[j] = self
                            .cost(cell)
                            .checked_sub(self.u[i])
                            .ok_or(Error::Overflow("potentials"))?;
                        col_done[j] = true;
                        stack.push(self.rows + j);
                    }
                }
            } else {
                let j = node - self.rows;
                for k in 0..self.col_adj[j].len() {
                    let cell = self.col_adj[j][k];
                    let i = cell / self.cols;
                    if !row_done[i] {
                        self.u[i] = self
                            .cost(cell)
                            .checked_sub(self.v[j])
                            .ok_or(Error::Overflow("potentials"))?;
                        row_done[i] = true;
                        stack.push(i);
                    }
                }
            }
        }
        debug_assert!(row_done.iter().all(|&b| b) && col_done.iter().all(|&b| b));
        Ok(())
    }

    fn entering_cell(&self) -> Option<usize> {
        (0..self.rows * self.cols).find(|&cell| {
            !self.is_basic[cell]
                && self.cost(cell) - self.u[cell / self.cols] - self.v[cell % self.cols] < 0
        })
    }

    /// Basic cells on the tree path from column `j` to row `i`, starting at
    /// the cell incident to column `j`.
    fn tree_path(&self, i: usize, j: usize) -> Vec<usize> {
        let total = self.rows + self.cols;
        let mut parent_cell = vec![usize::MAX; total];
        let mut seen = vec![false; total];
        let target = self.rows + j;
        let mut queue = std::collections::VecDeque::from([i]);
        seen[i] = true;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            let cells = if node < self.rows {
                &self.row_adj[node]
            } else {
                &self.col_adj[node - self.rows]
            };
            for &cell in cells {
                let next = if node < self.rows {
                    self.rows + cell % self.cols
                } else {
                    cell / self.cols
                };
                if !seen[next] {
                    seen[next] = true;
                    parent_cell[next] = cell;
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let cell = parent_cell[node];
            path.push(cell);
            node = if node < self.rows {
                self.rows + cell % self.cols
            } else {
                cell / self.cols
            };
        }
        path
    }

    fn solve(mut self) -> Result<EvalResult> {
        let mut pivots = 0usize;
        loop {
            self.rebuild_adjacency();
            self.compute_potentials()?;
            let Some(enter) = self.entering_cell() else {
                break;
            };
            let (ei, ej) = (enter / self.cols, enter % self.cols);
            // cycle: enter(+), path[0](-), path[1](+), ...
            let path = self.tree_path(ei, ej);
            let minus = path.iter().step_by(2).copied();
            let theta = minus.clone().map(|c| self.flow[c]).min().unwrap_or(0);
            let leave = minus
                .filter(|&c| self.flow[c] == theta)
                .min()
                .expect("stepping-stone cycle has a donor cell");
            self.flow[enter] += theta;
            for (k, &c) in path.iter().enumerate() {
                if k % 2 == 0 {
                    self.flow[c] -= theta;
                } else {
                    self.flow[c] += theta;
                }
            }
            self.is_basic[leave] = false;
            self.is_basic[enter] = true;
            let slot = self.basis.iter().position(|&c| c == leave).unwrap();
            self.basis[slot] = enter;
            pivots += 1;
        }

        let (m, n) = (self.sc.m, self.sc.n);
        let mut flow = vec![0i64; m * n];
        let mut objective = 0i64;
        for i in 0..m {
            for j in 0..n {
                let x = self.flow[i * self.cols + j];
                flow[i * n + j] = x;
                let term = x
                    .checked_mul(self.sc.cost[i * n + j])
                    .ok_or(Error::Overflow("objective"))?;
                objective = objective
                    .checked_add(term)
                    .ok_or(Error::Overflow("objective"))?;
            }
        }
        debug_assert!(flow.iter().all(|&x| x >= 0));
        Ok(EvalResult {
            status: LpStatus::Optimal,
            objective: Some(objective),
            flow,
            duals: Some(Duals {
                u: self.u.clone(),
                v: self.v[..n].to_vec(),
                v_dummy: self.v[n],
            }),
            pivots,
        })
    }
}
