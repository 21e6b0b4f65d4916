use std::time::Instant;

use clap::ValueEnum;
use itp_core::exact::{exact_worst_with, grid_oracle_worst_with_budget, ExactOptions};
use itp_core::heuristics::{exact_report, genetic, memetic, run_local_search, Algorithm, LsPolicy, RunReport};
use itp_core::instance::IntervalTpInstance;
use serde::Serialize;

use crate::{CliResult, SolverArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum OutputFormat {
    Json,
    Csv,
}

pub(crate) fn run_algorithm(
    inst: &IntervalTpInstance,
    alg: Algorithm,
    solver: &SolverArgs,
    seed: u64,
) -> CliResult<RunReport> {
    let report = match alg {
        Algorithm::Exact => {
            let clock = Instant::now();
            let opts = ExactOptions {
                max_dim: solver.max_dim,
                ..Default::default()
            };
            let res = exact_worst_with(inst, &opts)?;
            exact_report(inst, &res, clock.elapsed().as_secs_f64())
        }
        Algorithm::LsFirst => run_local_search(inst, LsPolicy::First, seed, solver.tls, solver.time_limit)?,
        Algorithm::LsBest => run_local_search(inst, LsPolicy::Best, seed, solver.tls, solver.time_limit)?,
        Algorithm::Genetic => genetic(inst, &solver.ga_params(seed))?,
        Algorithm::Memetic => memetic(inst, &solver.ga_params(seed))?,
    };
    Ok(report)
}

/// One report as a flat CSV record.
#[derive(Serialize)]
pub(crate) struct ReportRow<'a> {
    pub algorithm: &'a str,
    pub instance: &'a str,
    pub seed: u64,
    pub best_value: i64,
    pub wall_time_secs: f64,
    pub lp_count: u64,
    pub iterations: u64,
    pub generations: u64,
    pub best_config: String,
    pub best_supply: String,
    pub best_demand: String,
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

impl<'a> From<&'a RunReport> for ReportRow<'a> {
    fn from(r: &'a RunReport) -> Self {
        Self {
            algorithm: r.algorithm.as_str(),
            instance: &r.instance,
            seed: r.seed,
            best_value: r.best_value,
            wall_time_secs: r.wall_time_secs,
            lp_count: r.lp_count,
            iterations: r.iterations,
            generations: r.generations,
            best_config: r.best_config.as_ref().map(ToString::to_string).unwrap_or_default(),
            best_supply: join(&r.best_supply),
            best_demand: join(&r.best_demand),
        }
    }
}

pub(crate) fn render(reports: &[RunReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let text = if let [one] = reports {
                serde_json::to_string_pretty(one)
            } else {
                serde_json::to_string_pretty(reports)
            };
            text.expect("report serializes") + "\n"
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(ReportRow::from(r)).expect("in-memory csv write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
        }
    }
}

#[derive(Serialize)]
pub(crate) struct HeuristicCheck {
    pub algorithm: Algorithm,
    pub best_value: i64,
    /// `exact - best_value`; negative values are inconsistencies.
    pub gap: i64,
}

#[derive(Serialize)]
pub(crate) struct VerifyReport {
    pub instance: String,
    pub exact: i64,
    pub grid_oracle: i64,
    pub exact_paths_agree: bool,
    pub heuristics: Vec<HeuristicCheck>,
    pub consistent: bool,
}

pub(crate) fn verify(inst: &IntervalTpInstance, seed: u64, grid_budget: u128) -> CliResult<VerifyReport> {
    let exact = exact_worst_with(
        inst,
        &ExactOptions {
            all_feasible_shortcut: false,
            ..Default::default()
        },
    )?
    .worst_value;
    let grid = grid_oracle_worst_with_budget(inst, grid_budget)?;
    let defaults = SolverArgs::default();
    let mut heuristics = Vec::new();
    for alg in Algorithm::HEURISTICS {
        let r = run_algorithm(inst, alg, &defaults, seed)?;
        heuristics.push(HeuristicCheck {
            algorithm: alg,
            best_value: r.best_value,
            gap: exact - r.best_value,
        });
    }
    let agree = exact == grid;
    let consistent = agree && heuristics.iter().all(|h| h.gap >= 0);
    Ok(VerifyReport {
        instance: inst.name().to_string(),
        exact,
        grid_oracle: grid,
        exact_paths_agree: agree,
        heuristics,
        consistent,
    })
}
