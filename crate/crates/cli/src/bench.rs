//! Seeded multi-run experiments with a per-(instance, algorithm) summary.

use std::path::PathBuf;

use clap::Args;
use itp_core::heuristics::{Algorithm, RunReport};
use itp_core::instance::{generate_random, IntervalTpInstance};
use rayon::prelude::*;
use serde::Serialize;

use crate::run::run_algorithm;
use crate::{emit, load, parse_algorithm, CliError, CliResult, InputFormat, SolverArgs};

/// Environment variable holding the default worker count.
pub(crate) const THREADS_ENV: &str = "ITP_THREADS";

#[derive(Args)]
pub(crate) struct BenchArgs {
    /// Instance files.
    instances: Vec<PathBuf>,
    /// Generate `M N` instances instead of reading files.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    generate: Option<Vec<usize>>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 1)]
    gen_count: usize,
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "ls-first,ls-best,ga,ma")]
    algs: Vec<Algorithm>,
    /// Runs per (instance, algorithm); run `r` uses seed `seed_base + r`.
    #[arg(long, default_value_t = 5)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Worker threads; defaults to `ITP_THREADS`, then to the core count.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Aggregate CSV destination (stdout by default).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-run CSV destination.
    #[arg(long)]
    runs_out: Option<PathBuf>,
    /// Zero every wall-clock field.
    #[arg(long)]
    omit_timing: bool,
}

struct Cell {
    instance: usize,
    algorithm: Algorithm,
    seed: u64,
    outcome: Result<RunReport, String>,
}

/// Per-run record; report fields are empty for failed runs.
#[derive(Serialize)]
struct RunRow<'a> {
    instance: &'a str,
    algorithm: &'a str,
    seed: u64,
    status: &'a str,
    best_value: Option<i64>,
    wall_time_secs: Option<f64>,
    lp_count: Option<u64>,
    iterations: Option<u64>,
    generations: Option<u64>,
    best_config: String,
    error: &'a str,
}

impl<'a> RunRow<'a> {
    fn new(name: &'a str, c: &'a Cell) -> Self {
        let ok = c.outcome.as_ref().ok();
        Self {
            instance: name,
            algorithm: c.algorithm.as_str(),
            seed: c.seed,
            status: if ok.is_some() { "ok" } else { "failed" },
            best_value: ok.map(|r| r.best_value),
            wall_time_secs: ok.map(|r| r.wall_time_secs),
            lp_count: ok.map(|r| r.lp_count),
            iterations: ok.map(|r| r.iterations),
            generations: ok.map(|r| r.generations),
            best_config: ok
                .and_then(|r| r.best_config.as_ref())
                .map(ToString::to_string)
                .unwrap_or_default(),
            error: c.outcome.as_ref().err().map_or("", String::as_str),
        }
    }
}

/// Summary of one (instance, algorithm) pair over its successful runs.
#[derive(Debug, Serialize, PartialEq)]
pub(crate) struct AggregateRow {
    pub instance: String,
    pub algorithm: String,
    pub runs: u64,
    pub failures: u64,
    pub value_min: Option<i64>,
    pub value_avg: Option<f64>,
    pub value_max: Option<i64>,
    pub time_min: Option<f64>,
    pub time_avg: Option<f64>,
    pub time_max: Option<f64>,
    pub lp_min: Option<u64>,
    pub lp_avg: Option<f64>,
    pub lp_max: Option<u64>,
    pub iterations_avg: Option<f64>,
    pub generations_avg: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub(crate) fn aggregate(instance: &str, algorithm: Algorithm, reports: &[&RunReport], failures: u64) -> AggregateRow {
    let values = || reports.iter().map(|r| r.best_value);
    let times = || reports.iter().map(|r| r.wall_time_secs);
    let lps = || reports.iter().map(|r| r.lp_count);
    AggregateRow {
        instance: instance.to_string(),
        algorithm: algorithm.to_string(),
        runs: reports.len() as u64 + failures,
        failures,
        value_min: values().min(),
        value_avg: mean(values().map(|v| v as f64)),
        value_max: values().max(),
        time_min: times().reduce(f64::min),
        time_avg: mean(times()),
        time_max: times().reduce(f64::max),
        lp_min: lps().min(),
        lp_avg: mean(lps().map(|v| v as f64)),
        lp_max: lps().max(),
        iterations_avg: mean(reports.iter().map(|r| r.iterations as f64)),
        generations_avg: mean(reports.iter().map(|r| r.generations as f64)),
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn instances(args: &BenchArgs) -> CliResult<Vec<IntervalTpInstance>> {
    let mut out = Vec::new();
    for p in &args.instances {
        out.push(load(p, args.input_format)?);
    }
    if let Some(dims) = &args.generate {
        for i in 0..args.gen_count {
            // same defaults as `itp gen`
            out.push(generate_random(dims[0], dims[1], (1, 20), (10, 50), (10, 50), args.gen_seed + i as u64)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no instances: pass files or --generate M N".into()));
    }
    Ok(out)
}

fn csv_text<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

pub(crate) fn bench(args: BenchArgs) -> CliResult<()> {
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if args.algs.is_empty() {
        return Err(CliError::Usage("--algs must name at least one algorithm".into()));
    }
    let insts = instances(&args)?;
    let mut keys = Vec::new();
    for i in 0..insts.len() {
        for &alg in &args.algs {
            for r in 0..args.runs {
                keys.push((i, alg, args.seed_base.wrapping_add(r)));
            }
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count(args.threads)? {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let mut cells: Vec<Cell> = pool.install(|| {
        keys.par_iter()
            .map(|&(i, alg, seed)| {
                let outcome = run_algorithm(&insts[i], alg, &args.solver, seed)
                    .map(|r| if args.omit_timing { r.without_timing() } else { r })
                    .map_err(|e| match e {
                        CliError::Usage(m) | CliError::Data(m) | CliError::Inconsistent(m) => m,
                    });
                Cell {
                    instance: i,
                    algorithm: alg,
                    seed,
                    outcome,
                }
            })
            .collect()
    });
    cells.sort_by_key(|c| (c.instance, c.algorithm, c.seed));

    if let Some(path) = &args.runs_out {
        let text = csv_text(cells.iter().map(|c| RunRow::new(insts[c.instance].name(), c)));
        emit(&text, Some(path))?;
    }

    let mut rows = Vec::new();
    for (i, inst) in insts.iter().enumerate() {
        for &alg in &args.algs {
            let group: Vec<&Cell> = cells.iter().filter(|c| c.instance == i && c.algorithm == alg).collect();
            let ok: Vec<&RunReport> = group.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
            let failures = (group.len() - ok.len()) as u64;
            rows.push(aggregate(inst.name(), alg, &ok, failures));
        }
    }
    for c in cells.iter().filter(|c| c.outcome.is_err()) {
        eprintln!(
            "run failed: {} {} seed {}: {}",
            insts[c.instance].name(),
            c.algorithm,
            c.seed,
            c.outcome.as_ref().err().unwrap()
        );
    }
    emit(&csv_text(rows), args.out.as_deref())
}
