use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::local_search::local_search;
use super::operators::{crossover, mutate, select};
use super::{chance, params_json, Algorithm, GaParams, RunReport, TracePoint};
use crate::encoding::{balance, fitness, free_value, repair, Configuration, FitnessCache};
use crate::error::{Error, Result};
use crate::instance::{Feasibility, IntervalTpInstance};

/// Genetic algorithm. `prob_local_search` is ignored.
pub fn genetic(inst: &IntervalTpInstance, params: &GaParams) -> Result<RunReport> {
    evolve(inst, params, false)
}

/// Memetic algorithm: the genetic algorithm with local search applied to the
/// initial population and to crossover children, each with probability
/// `prob_local_search`. With that probability at 0 the trajectory matches
/// [`genetic`] for the same seed.
pub fn memetic(inst: &IntervalTpInstance, params: &GaParams) -> Result<RunReport> {
    evolve(inst, params, true)
}

struct Engine<'a> {
    inst: &'a IntervalTpInstance,
    params: &'a GaParams,
    rng: ChaCha8Rng,
    cache: FitnessCache,
    deadline: Option<Instant>,
    ls_iterations: u64,
}

impl Engine<'_> {
    /// Local search from `c`, after repairing and balancing it. A
    /// configuration with no balanced counterpart is returned as is.
    fn improve(&mut self, c: Configuration) -> Result<Configuration> {
        let c = if free_value(self.inst, &c).feasible {
            c
        } else {
            repair(self.inst, &c)?
        };
        let Some(start) = balance(self.inst, &c)? else {
            return Ok(c);
        };
        let out = local_search(
            self.inst,
            start,
            self.params.ls_policy,
            self.params.ls_iteration_cap,
            &mut self.cache,
            &mut self.rng,
            self.deadline,
            |_| {},
        )?;
        self.ls_iterations += out.iterations;
        Ok(out.config)
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

fn evolve(inst: &IntervalTpInstance, params: &GaParams, with_ls: bool) -> Result<RunReport> {
    params.validate()?;
    if inst.classify_feasibility() == Feasibility::NoFeasibleScenario {
        return Err(Error::NoFeasibleScenario);
    }
    let clock = Instant::now();
    let algorithm = if with_ls {
        Algorithm::Memetic
    } else {
        Algorithm::Genetic
    };
    let mut report = RunReport::empty(algorithm, inst, params_json(params), params.seed);
    let mut eng = Engine {
        inst,
        params,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        cache: FitnessCache::memoized(),
        deadline: params.deadline(clock),
        ls_iterations: 0,
    };
    let n = params.pop_size;

    let mut pop = Vec::with_capacity(n);
    for _ in 0..n {
        let c = Configuration::random(inst.dim(), &mut eng.rng);
        pop.push(if free_value(inst, &c).feasible {
            c
        } else {
            repair(inst, &c)?
        });
    }
    if with_ls {
        for slot in pop.iter_mut() {
            if chance(&mut eng.rng, params.prob_local_search) {
                *slot = eng.improve(slot.clone())?;
            }
        }
    }

    let mut stall = 0usize;
    loop {
        report.generations += 1;
        let mut fits = Vec::with_capacity(pop.len());
        let mut improved = false;
        for c in &pop {
            let f = fitness(inst, c, &mut eng.cache)?;
            fits.push(f);
            if report.best_config.is_none() || f > report.best_value {
                // store the feasible form so the reported scenario is valid
                let best = if free_value(inst, c).feasible {
                    c.clone()
                } else {
                    repair(inst, c)?
                };
                report.set_best(inst, &best, f);
                improved = true;
            }
        }
        if improved {
            stall = 0;
            report.value_trace.push(TracePoint {
                time_secs: clock.elapsed().as_secs_f64(),
                value: report.best_value,
            });
        } else {
            stall += 1;
        }
        if stall >= params.stall_limit || eng.timed_out() {
            break;
        }

        let mut next = select(&pop, &fits, params.selection, params.elite_count, n, &mut eng.rng)?;
        for p in 0..n / 2 {
            if chance(&mut eng.rng, params.prob_crossover) {
                let mut child = crossover(&next[2 * p], &next[2 * p + 1], &mut eng.rng)?;
                if with_ls && chance(&mut eng.rng, params.prob_local_search) {
                    child = eng.improve(child)?;
                }
                next.push(child);
            }
        }
        for slot in next.iter_mut() {
            let p = if free_value(inst, slot).balanced {
                params.prob_mutation_balanced
            } else {
                params.prob_mutation_unbalanced
            };
            if chance(&mut eng.rng, p) {
                *slot = mutate(inst, slot, &mut eng.rng)?;
            }
        }
        pop = next;
    }

    report.lp_count = eng.cache.lp_count();
    report.iterations = eng.ls_iterations;
    report.wall_time_secs = clock.elapsed().as_secs_f64();
    Ok(report)
}
