use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{params_json, Algorithm, LsPolicy, RunReport, TracePoint};
use crate::encoding::{
    balance, fitness, free_value, neighborhood, repair, Configuration, FitnessCache,
};
use crate::error::{Error, Result};
use crate::instance::{Feasibility, IntervalTpInstance};

/// Where a local search stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsOutcome {
    pub config: Configuration,
    pub value: i64,
    /// Neighborhood scans performed, including a final scan that found no
    /// improving neighbor.
    pub iterations: u64,
    pub moves: u64,
}

/// Hill-climbs from a balanced configuration.
///
/// `First` visits the neighborhood in a fresh random order each scan and
/// moves to the first strictly better neighbor. `Best` evaluates the whole
/// neighborhood in index order and moves to the best strictly better
/// neighbor, the lowest position winning ties; it draws no randomness.
/// Stops at a local optimum, after `cap` scans, or at `deadline`.
/// `on_improve` sees the start value and every accepted move.
#[allow(clippy::too_many_arguments)]
pub fn local_search<R: Rng + ?Sized>(
    inst: &IntervalTpInstance,
    start: Configuration,
    policy: LsPolicy,
    cap: Option<u64>,
    cache: &mut FitnessCache,
    rng: &mut R,
    deadline: Option<Instant>,
    mut on_improve: impl FnMut(i64),
) -> Result<LsOutcome> {
    start.check_dim(inst)?;
    if !free_value(inst, &start).balanced {
        return Err(Error::Precondition(format!(
            "local search needs a balanced start, got {start}"
        )));
    }
    let mut cur = start;
    let mut value = fitness(inst, &cur, cache)?;
    on_improve(value);
    let (mut iterations, mut moves) = (0u64, 0u64);
    loop {
        if cap.is_some_and(|c| iterations >= c) || deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        iterations += 1;
        let mut nb = neighborhood(inst, &cur);
        let step = match policy {
            LsPolicy::First => {
                nb.shuffle(rng);
                let mut found = None;
                for c in nb {
                    let f = fitness(inst, &c, cache)?;
                    if f > value {
                        found = Some((c, f));
                        break;
                    }
                }
                found
            }
            LsPolicy::Best => {
                let mut best: Option<(Configuration, i64)> = None;
                for c in nb {
                    let f = fitness(inst, &c, cache)?;
                    if f > best.as_ref().map_or(value, |b| b.1) {
                        best = Some((c, f));
                    }
                }
                best
            }
        };
        match step {
            Some((c, f)) => {
                debug_assert!(f > value);
                cur = c;
                value = f;
                moves += 1;
                on_improve(value);
            }
            None => break,
        }
    }
    Ok(LsOutcome {
        config: cur,
        value,
        iterations,
        moves,
    })
}

#[derive(Serialize)]
struct LsParams {
    policy: LsPolicy,
    iteration_cap: Option<u64>,
    time_limit_secs: Option<f64>,
    memoize: bool,
}

/// Full local-search run from a random start drawn with `seed`.
///
/// The start is repaired if infeasible and then balanced. If no balanced
/// configuration exists (every scenario is feasible) the start itself is
/// scored and no scans happen. No fitness memo is kept, so the LP count is
/// the number of neighbors evaluated plus one.
pub fn run_local_search(
    inst: &IntervalTpInstance,
    policy: LsPolicy,
    seed: u64,
    cap: Option<u64>,
    time_limit_secs: Option<f64>,
) -> Result<RunReport> {
    if cap == Some(0) {
        return Err(Error::InvalidParameter("iteration cap must be positive".into()));
    }
    if inst.classify_feasibility() == Feasibility::NoFeasibleScenario {
        return Err(Error::NoFeasibleScenario);
    }
    let clock = Instant::now();
    let deadline = time_limit_secs.map(|t| clock + std::time::Duration::from_secs_f64(t));
    let algorithm = match policy {
        LsPolicy::First => Algorithm::LsFirst,
        LsPolicy::Best => Algorithm::LsBest,
    };
    let params = params_json(&LsParams {
        policy,
        iteration_cap: cap,
        time_limit_secs,
        memoize: false,
    });
    let mut report = RunReport::empty(algorithm, inst, params, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = FitnessCache::unmemoized();

    let mut start = Configuration::random(inst.dim(), &mut rng);
    if !free_value(inst, &start).feasible {
        start = repair(inst, &start)?;
    }
    let outcome = match balance(inst, &start)? {
        Some(b) => {
            let mut trace = Vec::new();
            let out = local_search(inst, b, policy, cap, &mut cache, &mut rng, deadline, |v| {
                trace.push(TracePoint {
                    time_secs: clock.elapsed().as_secs_f64(),
                    value: v,
                })
            })?;
            report.value_trace = trace;
            out
        }
        None => {
            let value = fitness(inst, &start, &mut cache)?;
            LsOutcome {
                config: start,
                value,
                iterations: 0,
                moves: 0,
            }
        }
    };
    report.set_best(inst, &outcome.config, outcome.value);
    report.iterations = outcome.iterations;
    report.lp_count = cache.lp_count();
    report.wall_time_secs = clock.elapsed().as_secs_f64();
    if report.value_trace.is_empty() {
        report.value_trace.push(TracePoint {
            time_secs: report.wall_time_secs,
            value: outcome.value,
        });
    }
    Ok(report)
}

/// First-improvement run with no iteration cap.
pub fn local_search_first(inst: &IntervalTpInstance, seed: u64) -> Result<RunReport> {
    run_local_search(inst, LsPolicy::First, seed, None, None)
}

/// Best-improvement run with no iteration cap.
pub fn local_search_best(inst: &IntervalTpInstance, seed: u64) -> Result<RunReport> {
    run_local_search(inst, LsPolicy::Best, seed, None, None)
}
