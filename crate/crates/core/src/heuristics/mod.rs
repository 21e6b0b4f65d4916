//! Approximate solvers over the configuration space: first- and
//! best-improvement local search, a genetic algorithm and its memetic
//! variant, plus the selection, mutation and crossover operators.
//!
//! Every run owns one ChaCha8 stream seeded from the run seed. All random
//! choices are drawn from it sequentially, so a seed fixes the whole
//! trajectory. Probabilities of exactly 0 or 1 are decided without drawing.

mod evolution;
mod local_search;
mod operators;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{decode_vectors, Configuration};
use crate::error::{Error, Result};
use crate::instance::IntervalTpInstance;

pub use evolution::{genetic, memetic};
pub use local_search::{
    local_search, local_search_best, local_search_first, run_local_search, LsOutcome,
};
pub use operators::{crossover, mutate, select, selection_probabilities};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "ls-first")]
    LsFirst,
    #[serde(rename = "ls-best")]
    LsBest,
    #[serde(rename = "ga")]
    Genetic,
    #[serde(rename = "ma")]
    Memetic,
}

impl Algorithm {
    pub const HEURISTICS: [Algorithm; 4] = [
        Algorithm::LsFirst,
        Algorithm::LsBest,
        Algorithm::Genetic,
        Algorithm::Memetic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::LsFirst => "ls-first",
            Algorithm::LsBest => "ls-best",
            Algorithm::Genetic => "ga",
            Algorithm::Memetic => "ma",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "ls-first" => Ok(Algorithm::LsFirst),
            "ls-best" => Ok(Algorithm::LsBest),
            "ga" => Ok(Algorithm::Genetic),
            "ma" => Ok(Algorithm::Memetic),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LsPolicy {
    First,
    Best,
}

/// Parent selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Selection {
    /// Probability proportional to fitness.
    Fps1,
    /// Proportional to `f - f_min`.
    Fps2,
    /// Proportional to `f - g`, with `g` chosen so that the largest and
    /// smallest probabilities have ratio `ratio`.
    Fps3 { ratio: f64 },
    /// Best of `size` uniform draws with replacement.
    Tournament { size: usize },
}

pub const DEFAULT_FPS3_RATIO: f64 = 4.0;
pub const DEFAULT_TOURNAMENT_SIZE: usize = 3;

/// Parameters of the genetic and memetic algorithms (the local search uses
/// only `seed`, `ls_iteration_cap` and `time_limit_secs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub pop_size: usize,
    /// Stop after this many consecutive generations without a new incumbent.
    pub stall_limit: usize,
    pub prob_crossover: f64,
    pub prob_mutation_balanced: f64,
    pub prob_mutation_unbalanced: f64,
    /// Memetic only.
    pub prob_local_search: f64,
    /// `None` runs local search to a local optimum.
    pub ls_iteration_cap: Option<u64>,
    pub ls_policy: LsPolicy,
    pub selection: Selection,
    pub elite_count: usize,
    pub seed: u64,
    pub time_limit_secs: Option<f64>,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            pop_size: 30,
            stall_limit: 20,
            prob_crossover: 1.0,
            prob_mutation_balanced: 0.1,
            prob_mutation_unbalanced: 0.7,
            prob_local_search: 0.7,
            ls_iteration_cap: None,
            ls_policy: LsPolicy::First,
            selection: Selection::Tournament {
                size: DEFAULT_TOURNAMENT_SIZE,
            },
            elite_count: 0,
            seed: 0,
            time_limit_secs: None,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.pop_size == 0 {
            return bad("pop_size must be positive".into());
        }
        if self.stall_limit == 0 {
            return bad("stall_limit must be positive".into());
        }
        for (name, p) in [
            ("prob_crossover", self.prob_crossover),
            ("prob_mutation_balanced", self.prob_mutation_balanced),
            ("prob_mutation_unbalanced", self.prob_mutation_unbalanced),
            ("prob_local_search", self.prob_local_search),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.ls_iteration_cap == Some(0) {
            return bad("ls_iteration_cap must be positive".into());
        }
        match self.selection {
            Selection::Tournament { size } if size == 0 || size > self.pop_size => {
                return bad(format!(
                    "tournament size must lie in [1, pop_size = {}], got {size}",
                    self.pop_size
                ))
            }
            Selection::Fps3 { ratio } if !(ratio > 1.0 && ratio.is_finite()) => {
                return bad(format!("fps3 ratio must be a finite value > 1, got {ratio}"))
            }
            _ => {}
        }
        if self.elite_count > self.pop_size {
            return bad("elite_count cannot exceed pop_size".into());
        }
        if let Some(t) = self.time_limit_secs {
            if t.is_nan() || t <= 0.0 {
                return bad("time limit must be positive".into());
            }
        }
        Ok(())
    }

    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        self.time_limit_secs
            .map(|t| start + Duration::from_secs_f64(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub time_secs: f64,
    pub value: i64,
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub instance: String,
    /// Parameters as a JSON object with sorted keys.
    pub params: serde_json::Value,
    pub seed: u64,
    pub best_value: i64,
    pub best_config: Option<Configuration>,
    pub best_supply: Vec<i64>,
    pub best_demand: Vec<i64>,
    /// Scenario LPs solved (cache misses only).
    pub lp_count: u64,
    /// Local-search neighborhood scans, including the final one that found
    /// no improvement. For exact runs, scenarios examined.
    pub iterations: u64,
    pub generations: u64,
    pub wall_time_secs: f64,
    pub value_trace: Vec<TracePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped_infeasible: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped_unbalanced: Option<u64>,
}

impl RunReport {
    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_time_secs = 0.0;
        for p in &mut r.value_trace {
            p.time_secs = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub(crate) fn set_best(&mut self, inst: &IntervalTpInstance, config: &Configuration, value: i64) {
        let (s, d, _) = decode_vectors(inst, config);
        self.best_value = value;
        self.best_config = Some(config.clone());
        self.best_supply = s;
        self.best_demand = d;
    }

    pub(crate) fn empty(algorithm: Algorithm, inst: &IntervalTpInstance, params: serde_json::Value, seed: u64) -> Self {
        Self {
            algorithm,
            instance: inst.name().to_string(),
            params,
            seed,
            best_value: i64::MIN,
            best_config: None,
            best_supply: Vec::new(),
            best_demand: Vec::new(),
            lp_count: 0,
            iterations: 0,
            generations: 0,
            wall_time_secs: 0.0,
            value_trace: Vec::new(),
            skipped_infeasible: None,
            skipped_unbalanced: None,
        }
    }
}

/// Wraps an exact result in the common report shape.
pub fn exact_report(inst: &IntervalTpInstance, res: &crate::exact::ExactResult, wall_time_secs: f64) -> RunReport {
    RunReport {
        algorithm: Algorithm::Exact,
        instance: inst.name().to_string(),
        params: serde_json::json!({ "all_feasible_shortcut": res.used_shortcut }),
        seed: 0,
        best_value: res.worst_value,
        best_config: res.worst_config.clone(),
        best_supply: res.worst_scenario.supply.clone(),
        best_demand: res.worst_scenario.demand.clone(),
        lp_count: res.scenarios_examined,
        iterations: res.scenarios_examined,
        generations: 0,
        wall_time_secs,
        value_trace: vec![TracePoint {
            time_secs: wall_time_secs,
            value: res.worst_value,
        }],
        skipped_infeasible: Some(res.scenarios_skipped_infeasible),
        skipped_unbalanced: Some(res.scenarios_skipped_unbalanced),
    }
}

/// Bernoulli draw that consumes no randomness for certain outcomes.
pub(crate) fn chance<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen_bool(p)
    }
}

pub(crate) fn params_json<T: Serialize>(p: &T) -> serde_json::Value {
    // round-trip through Value so object keys come out sorted
    serde_json::to_value(p).expect("params serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GaParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = GaParams {
            prob_crossover: 1.5,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = GaParams {
            selection: Selection::Tournament { size: 31 },
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = GaParams {
            selection: Selection::Fps3 { ratio: 1.0 },
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Exact, Algorithm::LsFirst, Algorithm::LsBest, Algorithm::Genetic, Algorithm::Memetic] {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
    }
}
