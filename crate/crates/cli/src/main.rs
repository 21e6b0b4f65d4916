//! `itp`: solve, benchmark, generate and cross-check interval transportation
//! problems.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! consistency failure (reported by `verify`).

mod bench;
mod run;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itp_core::exact::{DEFAULT_GRID_BUDGET, DEFAULT_MAX_DIM};
use itp_core::heuristics::{Algorithm, GaParams, LsPolicy, Selection};
use itp_core::instance::{generate_random, read_instance, write_instance, Format, IntervalTpInstance};

use crate::run::OutputFormat;

#[derive(Parser)]
#[command(name = "itp", version, about = "Worst-case optimal value of interval transportation problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance and print its report.
    Solve(SolveArgs),
    /// Run several solvers over several seeds and aggregate the results.
    Bench(bench::BenchArgs),
    /// Write random instances with doubled upper bounds.
    Gen(GenArgs),
    /// Cross-check the exact solver against the grid oracle and heuristics.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SelectionKind {
    Fps1,
    Fps2,
    Fps3,
    Tournament,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    First,
    Best,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputFormat {
    Json,
    Csv,
}

impl From<InputFormat> for Format {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Json => Format::CanonicalJson,
            InputFormat::Csv => Format::FlatCsv,
        }
    }
}

/// Solver parameters shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
struct SolverArgs {
    /// Population size.
    #[arg(long, default_value_t = 30)]
    pop: usize,
    /// Generations without improvement before stopping.
    #[arg(long, default_value_t = 20)]
    tga: usize,
    /// Local-search probability (memetic only).
    #[arg(long, default_value_t = 0.7)]
    pls: f64,
    /// Local-search iteration cap; unlimited if omitted.
    #[arg(long)]
    tls: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pm_balanced: f64,
    #[arg(long, default_value_t = 0.7)]
    pm_unbalanced: f64,
    /// Crossover probability.
    #[arg(long, default_value_t = 1.0)]
    pc: f64,
    #[arg(long, value_enum, default_value_t = SelectionKind::Tournament)]
    selection: SelectionKind,
    #[arg(long, default_value_t = 4.0)]
    fps3_ratio: f64,
    #[arg(long, default_value_t = 3)]
    tournament_size: usize,
    /// Members copied unchanged into the next selection.
    #[arg(long, default_value_t = 0)]
    elite: usize,
    /// Local-search policy used inside the memetic algorithm.
    #[arg(long, value_enum, default_value_t = PolicyArg::First)]
    ls_policy: PolicyArg,
    /// Wall-clock limit per run in seconds, checked between generations and
    /// local-search iterations.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Largest m + n accepted by the exact solver.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
}

impl Default for SolverArgs {
    /// The command-line defaults.
    fn default() -> Self {
        #[derive(Parser)]
        struct Wrapper {
            #[command(flatten)]
            solver: SolverArgs,
        }
        Wrapper::parse_from(["itp"]).solver
    }
}

impl SolverArgs {
    fn ga_params(&self, seed: u64) -> GaParams {
        GaParams {
            pop_size: self.pop,
            stall_limit: self.tga,
            prob_crossover: self.pc,
            prob_mutation_balanced: self.pm_balanced,
            prob_mutation_unbalanced: self.pm_unbalanced,
            prob_local_search: self.pls,
            ls_iteration_cap: self.tls,
            ls_policy: match self.ls_policy {
                PolicyArg::First => LsPolicy::First,
                PolicyArg::Best => LsPolicy::Best,
            },
            selection: match self.selection {
                SelectionKind::Fps1 => Selection::Fps1,
                SelectionKind::Fps2 => Selection::Fps2,
                SelectionKind::Fps3 => Selection::Fps3 {
                    ratio: self.fps3_ratio,
                },
                SelectionKind::Tournament => Selection::Tournament {
                    size: self.tournament_size,
                },
            },
            elite_count: self.elite,
            seed,
            time_limit_secs: self.time_limit,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, or `-` for stdin.
    instance: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Instance format; inferred from the file extension by default.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Zero every wall-clock field, for byte-stable output.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct GenArgs {
    m: usize,
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Seed of the first instance; instance `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cost lower-bound range `LO,HI`.
    #[arg(long, value_parser = parse_range, default_value = "1,20")]
    cost: (i64, i64),
    /// Supply lower-bound range `LO,HI`; upper bounds are doubled.
    #[arg(long, value_parser = parse_range, default_value = "10,50")]
    supply: (i64, i64),
    /// Demand lower-bound range `LO,HI`; upper bounds are doubled.
    #[arg(long, value_parser = parse_range, default_value = "10,50")]
    demand: (i64, i64),
    #[arg(long, default_value = ".")]
    outdir: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Json)]
    format: InputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file, or `-` for stdin.
    instance: PathBuf,
    /// Seed shared by the heuristic runs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of integer points the grid oracle may visit.
    #[arg(long, default_value_t = DEFAULT_GRID_BUDGET)]
    grid_budget: u128,
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: itp_core::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

/// Error carrying its exit code.
#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Data(String),
    Inconsistent(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Inconsistent(m) => m,
        }
    }
}

impl From<itp_core::Error> for CliError {
    fn from(e: itp_core::Error) -> Self {
        match e {
            itp_core::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

pub(crate) fn load(path: &Path, format: Option<InputFormat>) -> CliResult<IntervalTpInstance> {
    let format = format.map(Format::from);
    let mut inst = if path.as_os_str() == "-" {
        let mut text = Vec::new();
        io::stdin().read_to_end(&mut text)?;
        read_instance(text.as_slice(), format.unwrap_or(Format::CanonicalJson))
    } else {
        let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        read_instance(io::BufReader::new(file), format.unwrap_or_else(|| Format::from_path(path)))
    }
    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if inst.name().is_empty() {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("stdin");
        inst.set_name(stem);
    }
    Ok(inst)
}

pub(crate) fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn solve(args: SolveArgs) -> CliResult<()> {
    let inst = load(&args.instance, args.input_format)?;
    let mut report = run::run_algorithm(&inst, args.alg, &args.solver, args.seed)?;
    if args.omit_timing {
        report = report.without_timing();
    }
    emit(&run::render(&[report], args.format), args.out.as_deref())
}

fn gen(args: GenArgs) -> CliResult<()> {
    fs::create_dir_all(&args.outdir)?;
    let format = Format::from(args.format);
    let ext = match args.format {
        InputFormat::Json => "json",
        InputFormat::Csv => "csv",
    };
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let inst = generate_random(args.m, args.n, args.cost, args.supply, args.demand, seed)?;
        let path = args.outdir.join(format!("{}.{ext}", inst.name()));
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf, format)?;
        fs::write(&path, buf).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> CliResult<()> {
    let inst = load(&args.instance, args.input_format)?;
    let report = run::verify(&inst, args.seed, args.grid_budget)?;
    let text = serde_json::to_string_pretty(&report).expect("verify report serializes");
    emit(&(text + "\n"), None)?;
    if report.consistent {
        Ok(())
    } else {
        Err(CliError::Inconsistent("exact paths disagree or a heuristic exceeded the exact value".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench::bench(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
