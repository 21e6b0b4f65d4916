//! Exact worst finite optimal value.
//!
//! The worst value is attained at a balanced quasi-extreme scenario with the
//! upper cost matrix: every supply and demand sits at a bound except one free
//! coordinate, which balances total supply and demand. [`exact_worst`]
//! enumerates all `(m + n) * 2^(m+n-1)` such sign patterns, supply free
//! positions first, and solves one LP per pattern that survives two filters:
//!
//! * infeasible: no value of the free coordinate reaches feasibility;
//! * unbalanced: even the lower bound of a free supply (upper bound of a free
//!   demand) leaves a surplus. Such patterns are dominated by a balanced one
//!   whenever some infeasible scenario exists.
//!
//! Sign patterns are visited in Gray-code order, so consecutive patterns
//! differ in one coordinate. [`grid_oracle_worst`] is an independent brute
//! force over every integer point of the supply/demand box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::Configuration;
use crate::error::{Error, Result};
use crate::instance::{Feasibility, IntervalTpInstance, Scenario};
use crate::transport;

/// Default cap on `m + n` for exact enumeration.
pub const DEFAULT_MAX_DIM: usize = 24;
/// Above this `m + n` the CLI warns about runtime.
pub const WARN_DIM: usize = 20;
/// Default number of LPs the grid oracle may solve.
pub const DEFAULT_GRID_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub max_dim: usize,
    /// Evaluate `(C_hi, s_lo, d_hi)` directly when every scenario is feasible.
    pub all_feasible_shortcut: bool,
    /// Enumerate free positions on the rayon pool. The result is identical
    /// to the sequential run.
    pub parallel: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            all_feasible_shortcut: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactResult {
    pub worst_value: i64,
    pub worst_scenario: Scenario,
    /// Sign pattern of the maximizer; `None` when the shortcut was taken.
    pub worst_config: Option<Configuration>,
    pub scenarios_examined: u64,
    pub scenarios_skipped_infeasible: u64,
    pub scenarios_skipped_unbalanced: u64,
    pub used_shortcut: bool,
}

pub fn exact_worst(instance: &IntervalTpInstance) -> Result<ExactResult> {
    exact_worst_with(instance, &ExactOptions::default())
}

pub fn exact_worst_with(instance: &IntervalTpInstance, opts: &ExactOptions) -> Result<ExactResult> {
    let feasibility = instance.classify_feasibility();
    if feasibility == Feasibility::NoFeasibleScenario {
        return Err(Error::NoFeasibleScenario);
    }
    if feasibility == Feasibility::AllScenariosFeasible && opts.all_feasible_shortcut {
        let sc = instance.scenario_at_upper_cost(
            instance.supply().iter().map(|s| s.lo).collect(),
            instance.demand().iter().map(|d| d.hi).collect(),
        );
        let value = solve(&sc)?;
        return Ok(ExactResult {
            worst_value: value,
            worst_scenario: sc,
            worst_config: None,
            scenarios_examined: 1,
            scenarios_skipped_infeasible: 0,
            scenarios_skipped_unbalanced: 0,
            used_shortcut: true,
        });
    }

    let dim = instance.dim();
    if dim > opts.max_dim {
        return Err(Error::InstanceTooLarge {
            size: dim,
            cap: opts.max_dim,
        });
    }
    // The balance filter relies on the existence of an infeasible scenario.
    // Without one, surplus patterns are evaluated with the free value clamped.
    let skip_unbalanced = feasibility == Feasibility::Mixed;

    let parts: Vec<Result<Partial>> = if opts.parallel {
        (0..dim)
            .into_par_iter()
            .map(|k| enumerate_free(instance, k, skip_unbalanced))
            .collect()
    } else {
        (0..dim)
            .map(|k| enumerate_free(instance, k, skip_unbalanced))
            .collect()
    };

    let mut examined = 0;
    let mut skipped_inf = 0;
    let mut skipped_unb = 0;
    let mut best: Option<(i64, Configuration)> = None;
    for part in parts {
        let part = part?;
        examined += part.examined;
        skipped_inf += part.skipped_infeasible;
        skipped_unb += part.skipped_unbalanced;
        if let Some((v, c)) = part.best {
            // strict improvement keeps the first maximizer in enumeration order
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, c));
            }
        }
    }
    let (worst_value, config) = best.ok_or_else(|| {
        Error::Precondition("no balanced quasi-extreme scenario was examined".into())
    })?;
    let (supply, demand, _) = crate::encoding::decode_vectors(instance, &config);
    Ok(ExactResult {
        worst_value,
        worst_scenario: instance.scenario_at_upper_cost(supply, demand),
        worst_config: Some(config),
        scenarios_examined: examined,
        scenarios_skipped_infeasible: skipped_inf,
        scenarios_skipped_unbalanced: skipped_unb,
        used_shortcut: false,
    })
}

#[derive(Default)]
struct Partial {
    best: Option<(i64, Configuration)>,
    examined: u64,
    skipped_infeasible: u64,
    skipped_unbalanced: u64,
}

fn solve(sc: &Scenario) -> Result<i64> {
    transport::evaluate(sc)?
        .objective
        .ok_or_else(|| Error::Precondition("examined scenario is infeasible".into()))
}

/// All sign patterns with free position `k`, in Gray-code order.
fn enumerate_free(inst: &IntervalTpInstance, k: usize, skip_unbalanced: bool) -> Result<Partial> {
    let m = inst.m();
    let dim = inst.dim();
    let others: Vec<usize> = (0..dim).filter(|&i| i != k).collect();
    let free_bound = inst.bound(k);
    let free_is_supply = k < m;

    // Gray code 0 puts every other coordinate at its lower bound.
    let mut signs: Vec<i8> = vec![-1; dim];
    signs[k] = 0;
    let mut other_s: i64 = (0..m).filter(|&i| i != k).map(|i| inst.supply()[i].lo).sum();
    let mut other_d: i64 = (m..dim).filter(|&j| j != k).map(|j| inst.demand()[j - m].lo).sum();

    let mut part = Partial::default();
    let mut supply = vec![0i64; m];
    let mut demand = vec![0i64; inst.n()];
    let total: u64 = 1 << others.len();
    for t in 0..total {
        if t > 0 {
            let bit = t.trailing_zeros() as usize;
            let idx = others[bit];
            let b = inst.bound(idx);
            let delta = if signs[idx] < 0 { b.width() } else { -b.width() };
            signs[idx] = -signs[idx];
            if idx < m {
                other_s += delta;
            } else {
                other_d += delta;
            }
        }

        let free_value = if free_is_supply {
            let need = other_d - other_s;
            if need > free_bound.hi {
                part.skipped_infeasible += 1;
                continue;
            }
            if free_bound.lo > need {
                if skip_unbalanced {
                    part.skipped_unbalanced += 1;
                    continue;
                }
                free_bound.lo
            } else {
                need
            }
        } else {
            let room = other_s - other_d;
            if room < free_bound.lo {
                part.skipped_infeasible += 1;
                continue;
            }
            if free_bound.hi < room {
                if skip_unbalanced {
                    part.skipped_unbalanced += 1;
                    continue;
                }
                free_bound.hi
            } else {
                room
            }
        };

        for (idx, &sign) in signs.iter().enumerate() {
            let b = inst.bound(idx);
            let v = if idx == k {
                free_value
            } else if sign > 0 {
                b.hi
            } else {
                b.lo
            };
            if idx < m {
                supply[idx] = v;
            } else {
                demand[idx - m] = v;
            }
        }
        let sc = inst.scenario_at_upper_cost(supply.clone(), demand.clone());
        let value = solve(&sc)?;
        part.examined += 1;
        if part.best.as_ref().is_none_or(|(bv, _)| value > *bv) {
            part.best = Some((value, Configuration::new(signs.clone())?));
        }
    }
    Ok(part)
}

/// Number of integer supply/demand points in the instance's box.
pub fn grid_size(instance: &IntervalTpInstance) -> u128 {
    instance
        .supply()
        .iter()
        .chain(instance.demand())
        .map(|iv| (iv.width() as u128) + 1)
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// Worst optimal value over every integer `(s, d)` in the box with
/// `sum(s) >= sum(d)`, at the upper cost matrix.
pub fn grid_oracle_worst(instance: &IntervalTpInstance) -> Result<i64> {
    grid_oracle_worst_with_budget(instance, DEFAULT_GRID_BUDGET)
}

pub fn grid_oracle_worst_with_budget(instance: &IntervalTpInstance, budget: u128) -> Result<i64> {
    let points = grid_size(instance);
    if points > budget {
        return Err(Error::BudgetExceeded { points, budget });
    }
    let bounds: Vec<_> = instance.supply().iter().chain(instance.demand()).copied().collect();
    let m = instance.m();
    let mut point: Vec<i64> = bounds.iter().map(|b| b.lo).collect();
    let mut best: Option<i64> = None;
    loop {
        let (s, d) = point.split_at(m);
        if s.iter().sum::<i64>() >= d.iter().sum::<i64>() {
            let sc = instance.scenario_at_upper_cost(s.to_vec(), d.to_vec());
            let v = solve(&sc)?;
            best = Some(best.map_or(v, |b| b.max(v)));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == point.len() {
                return best.ok_or(Error::NoFeasibleScenario);
            }
            if point[pos] < bounds[pos].hi {
                point[pos] += 1;
                break;
            }
            point[pos] = bounds[pos].lo;
            pos += 1;
        }
    }
}
