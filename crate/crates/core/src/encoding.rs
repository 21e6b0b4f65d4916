//! Sign-vector encoding of quasi-extreme scenarios.
//!
//! A [`Configuration`] is a vector over `{-1, 0, +1}` of length `m + n` with
//! exactly one zero. Positions `0..m` address supplies, `m..m+n` demands.
//! `-1` puts the coordinate at its lower bound, `+1` at its upper bound, and
//! the zero marks the free coordinate, whose value is chosen to balance total
//! supply against total demand and then clamped into its interval. The cost
//! matrix is always the upper cost matrix.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::{IntervalTpInstance, Scenario};
use crate::transport;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    signs: Vec<i8>,
    free: usize,
}

impl Configuration {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| !matches!(s, -1..=1)) {
            return Err(Error::InvalidConfiguration(format!(
                "entry {bad} is not in {{-1, 0, 1}}"
            )));
        }
        let zeros: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] == 0).collect();
        match zeros.as_slice() {
            [free] => Ok(Self { free: *free, signs }),
            _ => Err(Error::InvalidConfiguration(format!(
                "expected exactly one zero, found {}",
                zeros.len()
            ))),
        }
    }

    /// Uniform free index, then a fair sign for every other position in order.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let free = rng.gen_range(0..dim);
        let signs = (0..dim)
            .map(|i| match i == free {
                true => 0,
                false if rng.gen_bool(0.5) => 1,
                false => -1,
            })
            .collect();
        Self { signs, free }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn free_index(&self) -> usize {
        self.free
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn check_dim(&self, instance: &IntervalTpInstance) -> Result<()> {
        if self.len() != instance.dim() {
            return Err(Error::DimensionMismatch(format!(
                "configuration has length {}, instance needs {}",
                self.len(),
                instance.dim()
            )));
        }
        Ok(())
    }

    /// Copy with the non-free position `i` switched to its other bound.
    pub fn flipped(&self, i: usize) -> Self {
        assert_ne!(i, self.free, "the free position has no sign to flip");
        let mut c = self.clone();
        c.signs[i] = -c.signs[i];
        c
    }

    /// Copy where `new_free` becomes the free position and the old free
    /// position is pinned to the bound given by `old_sign`.
    pub fn with_free_moved(&self, new_free: usize, old_sign: i8) -> Self {
        debug_assert!(old_sign == 1 || old_sign == -1);
        let mut c = self.clone();
        c.signs[c.free] = old_sign;
        c.signs[new_free] = 0;
        c.free = new_free;
        c
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(match s {
                -1 => "-",
                0 => "0",
                _ => "+",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '-' => Ok(-1),
                '0' => Ok(0),
                '+' => Ok(1),
                other => Err(Error::InvalidConfiguration(format!(
                    "unexpected character `{other}`"
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(signs)
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

/// Outcome of placing the free value, without materializing the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeValue {
    pub value: i64,
    /// The free value fell outside its interval and was cut to a bound.
    pub clamped: bool,
    pub feasible: bool,
    pub balanced: bool,
}

fn pinned(inst: &IntervalTpInstance, idx: usize, sign: i8) -> i64 {
    let b = inst.bound(idx);
    if sign > 0 {
        b.hi
    } else {
        b.lo
    }
}

/// Places the free value of `config`.
///
/// Free supply `k`: `max(lo_k, min(sum(d) - sum_{i != k} s_i, hi_k))`.
/// Free demand `k`: `min(hi_k, max(sum(s) - sum_{j != k} d_j, lo_k))`.
/// When no value in the interval gives feasibility the clamp lands on `hi_k`
/// (supply) or `lo_k` (demand), which are the least infeasible choices.
pub fn free_value(inst: &IntervalTpInstance, config: &Configuration) -> FreeValue {
    let m = inst.m();
    let k = config.free;
    let (mut other_s, mut other_d) = (0i64, 0i64);
    for (idx, &sign) in config.signs.iter().enumerate() {
        if idx == k {
            continue;
        }
        if idx < m {
            other_s += pinned(inst, idx, sign);
        } else {
            other_d += pinned(inst, idx, sign);
        }
    }
    let b = inst.bound(k);
    if k < m {
        let target = other_d - other_s;
        let value = target.clamp(b.lo, b.hi);
        FreeValue {
            value,
            clamped: value != target,
            feasible: target <= b.hi,
            balanced: value == target,
        }
    } else {
        let target = other_s - other_d;
        let value = target.clamp(b.lo, b.hi);
        FreeValue {
            value,
            clamped: value != target,
            feasible: target >= b.lo,
            balanced: value == target,
        }
    }
}

/// A configuration turned into a concrete scenario at the upper cost matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedScenario {
    pub scenario: Scenario,
    pub balanced: bool,
    pub feasible: bool,
    pub clamped: bool,
}

/// Supply and demand vectors encoded by `config`.
pub fn decode_vectors(inst: &IntervalTpInstance, config: &Configuration) -> (Vec<i64>, Vec<i64>, FreeValue) {
    let m = inst.m();
    let fv = free_value(inst, config);
    let mut supply = Vec::with_capacity(m);
    let mut demand = Vec::with_capacity(inst.n());
    for (idx, &sign) in config.signs.iter().enumerate() {
        let v = if idx == config.free {
            fv.value
        } else {
            pinned(inst, idx, sign)
        };
        if idx < m {
            supply.push(v);
        } else {
            demand.push(v);
        }
    }
    (supply, demand, fv)
}

pub fn decode(inst: &IntervalTpInstance, config: &Configuration) -> DecodedScenario {
    let (supply, demand, fv) = decode_vectors(inst, config);
    DecodedScenario {
        scenario: inst.scenario_at_upper_cost(supply, demand),
        balanced: fv.balanced,
        feasible: fv.feasible,
        clamped: fv.clamped,
    }
}

// ---------------------------------------------------------------------------
// Repair and balancing
// ---------------------------------------------------------------------------

/// Makes an infeasible configuration feasible.
///
/// Supplies at their lower bound are raised one at a time in ascending
/// order, then demands at their upper bound are lowered, re-decoding after
/// each flip and stopping at the first feasible one. The free position never
/// moves.
pub fn repair(inst: &IntervalTpInstance, config: &Configuration) -> Result<Configuration> {
    config.check_dim(inst)?;
    if free_value(inst, config).feasible {
        return Err(Error::Precondition(format!(
            "repair called on feasible configuration {config}"
        )));
    }
    let m = inst.m();
    let mut cur = config.clone();
    let supply_ups = (0..m).filter(|&i| cur.signs[i] == -1);
    let demand_downs = (m..inst.dim()).filter(|&j| cur.signs[j] == 1);
    let order: Vec<usize> = supply_ups.chain(demand_downs).collect();
    for idx in order {
        cur.signs[idx] = -cur.signs[idx];
        if free_value(inst, &cur).feasible {
            return Ok(cur);
        }
    }
    Err(Error::RepairFailed)
}

/// Turns a feasible but unbalanced configuration into a balanced one whose
/// value is at least as large.
///
/// The free coordinate stays pinned at the bound it was clamped to. Surplus
/// supply is then removed by lowering supplies at their upper bound and
/// raising demands at their lower bound, in ascending order. The first
/// coordinate whose range covers the remaining surplus becomes the free one;
/// coordinates before it are flipped outright. Every coordinate only moves
/// down (supply) or up (demand), which never decreases the optimal value.
/// Returns `None` when even the smallest supply against the largest demand
/// leaves a surplus.
pub fn balance(inst: &IntervalTpInstance, config: &Configuration) -> Result<Option<Configuration>> {
    config.check_dim(inst)?;
    let fv = free_value(inst, config);
    if !fv.feasible {
        return Err(Error::Precondition(format!(
            "balance called on infeasible configuration {config}"
        )));
    }
    if fv.balanced {
        return Ok(Some(config.clone()));
    }
    let m = inst.m();
    let k = config.free;
    // unbalanced and feasible: free supply sits at its lower bound, free
    // demand at its upper bound
    let clamp_sign: i8 = if k < m { -1 } else { 1 };
    let mut cur = config.clone();
    let candidates: Vec<usize> = (0..m)
        .filter(|&i| i != k && cur.signs[i] == 1)
        .chain((m..inst.dim()).filter(|&j| j != k && cur.signs[j] == -1))
        .collect();
    for idx in candidates {
        let swapped = cur.with_free_moved(idx, clamp_sign);
        if free_value(inst, &swapped).balanced {
            return Ok(Some(swapped));
        }
        cur = cur.flipped(idx);
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Fitness
// ---------------------------------------------------------------------------

/// Per-run fitness memo and LP counter.
#[derive(Debug, Clone, Default)]
pub struct FitnessCache {
    memo: Option<HashMap<Vec<i8>, i64>>,
    lp_count: u64,
}

impl FitnessCache {
    /// Memoizes fitness by sign vector.
    pub fn memoized() -> Self {
        Self {
            memo: Some(HashMap::new()),
            lp_count: 0,
        }
    }

    /// Solves an LP for every request.
    pub fn unmemoized() -> Self {
        Self::default()
    }

    /// Number of scenario LPs solved so far.
    pub fn lp_count(&self) -> u64 {
        self.lp_count
    }

    pub fn len(&self) -> usize {
        self.memo.as_ref().map_or(0, HashMap::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Optimal value of the scenario encoded by `config`; an infeasible
/// configuration is scored by its repaired counterpart. `config` itself is
/// left unchanged.
pub fn fitness(inst: &IntervalTpInstance, config: &Configuration, cache: &mut FitnessCache) -> Result<i64> {
    config.check_dim(inst)?;
    if let Some(&v) = cache.memo.as_ref().and_then(|m| m.get(&config.signs)) {
        return Ok(v);
    }
    let target = if free_value(inst, config).feasible {
        config.clone()
    } else {
        repair(inst, config)?
    };
    let (supply, demand, _) = decode_vectors(inst, &target);
    let sc = inst.scenario_at_upper_cost(supply, demand);
    let res = transport::evaluate(&sc)?;
    cache.lp_count += 1;
    let value = res
        .objective
        .expect("decoded configuration is feasible after repair");
    if let Some(memo) = cache.memo.as_mut() {
        memo.insert(config.signs.clone(), value);
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Neighborhood
// ---------------------------------------------------------------------------

/// Neighbor obtained by perturbing position `i` of a balanced configuration.
///
/// First the sign at `i` is flipped while the free value rebalances. If that
/// clamps, `i` becomes the free position instead and the old free position
/// is pinned to a bound, trying the direction that can only worsen the
/// scenario first (supply down, demand up). Returns `None` when no variant
/// is balanced.
pub fn perturb(inst: &IntervalTpInstance, config: &Configuration, i: usize) -> Option<Configuration> {
    let k = config.free;
    if i == k {
        return None;
    }
    let flipped = config.flipped(i);
    if free_value(inst, &flipped).balanced {
        return Some(flipped);
    }
    let worsening: i8 = if k < inst.m() { -1 } else { 1 };
    [worsening, -worsening]
        .into_iter()
        .map(|sign| config.with_free_moved(i, sign))
        .find(|c| free_value(inst, c).balanced)
}

/// Balanced neighbors of a balanced configuration, ordered by the perturbed
/// position. Positions without a balanced variant are skipped, so the list
/// has at most `m + n - 1` entries.
pub fn neighborhood(inst: &IntervalTpInstance, config: &Configuration) -> Vec<Configuration> {
    debug_assert!(free_value(inst, config).balanced);
    (0..config.len())
        .filter_map(|i| perturb(inst, config, i))
        .collect()
}
