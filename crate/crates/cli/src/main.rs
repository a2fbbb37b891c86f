//! `itso`: run single optimizations, benchmark grids, marginal-distribution
//! snapshots and external black-box objectives.
//!
//! Exit status is 0 on success, 1 when a run fails and 2 for invalid
//! arguments.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use itso::external::ExternalEvaluator;
use itso::harness::OptimizerKind;
use itso::objectives::CATALOG;
use itso::optimizer::{default_kernel, full_marginal, optimize_with_history};
use itso::sampling::DEFAULT_EPSILON0;
use itso::{
    optimize, write_trace, Benchmark, Config64, Grid64, Kernel64, Objective, Result64, Variant,
};

/// Points at which each trace-dist snapshot is tabulated.
const SNAPSHOT_GRID: usize = 512;

/// Box used for external objectives when `--lb`/`--ub` are absent.
const EXTERNAL_BOX: (f64, f64) = (-15.0, 15.0);

#[derive(Parser)]
#[command(name = "itso", version, about = "Inverse transform sampling optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize one benchmark objective and print the result as JSON.
    Optimize(OptimizeArgs),
    /// Run an (optimizer x objective x repeat) grid and write its artifacts.
    Bench(BenchArgs),
    /// Write `x,pdf,cdf` snapshots of the full variant's marginal on a 1-D objective.
    TraceDist(TraceDistArgs),
    /// Minimize an objective computed by a child process over a line protocol.
    External(ExternalArgs),
}

#[derive(Args)]
struct Problem {
    /// Number of decision variables.
    #[arg(long, default_value_t = 10)]
    dim: usize,
    /// Objective evaluations allowed.
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lower bound of every coordinate [default: the objective's box].
    #[arg(long, allow_negative_numbers = true)]
    lb: Option<f64>,
    /// Upper bound of every coordinate [default: the objective's box].
    #[arg(long, allow_negative_numbers = true)]
    ub: Option<f64>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long, value_enum, default_value_t = VariantArg::Short)]
    variant: VariantArg,
    /// Elite count of the short variant [default: max(2, budget / 25)].
    #[arg(long)]
    alpha: Option<usize>,
    /// Kernel of the full variant.
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Benchmark objective name.
    #[arg(long)]
    objective: String,
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    tuning: Tuning,
    /// Write the best-so-far trace as CSV.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExternalArgs {
    /// Evaluator command line, split on whitespace into program and arguments.
    #[arg(long)]
    cmd: String,
    /// Longest wait for a single evaluation.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated objective names, or `all`.
    #[arg(long, default_value = "all")]
    functions: String,
    /// Comma-separated optimizers out of itso-short, itso-full, random, de.
    #[arg(long, default_value = "itso-short,random,de")]
    optimizers: String,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[command(flatten)]
    problem: Problem,
    /// Elite count of itso-short [default: max(2, budget / 25)].
    #[arg(long)]
    alpha: Option<usize>,
    /// Kernel of itso-full.
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,
    /// Directory receiving traces, aggregates, summary and manifest.
    #[arg(long, default_value = "itso-bench")]
    out: PathBuf,
}

#[derive(Args)]
struct TraceDistArgs {
    /// Benchmark objective name, evaluated in one dimension.
    #[arg(long)]
    objective: String,
    /// Must be 1.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Objective evaluations [default: the largest snapshot].
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    lb: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ub: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,
    /// Comma-separated history lengths at which to snapshot the marginal.
    #[arg(long, default_value = "3,100,350,500")]
    snapshots: String,
    /// Directory receiving `snapshot_<k>.csv` files.
    #[arg(long, default_value = "itso-trace")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Short,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Short => Variant::Short,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    /// Gaussian with a sharpness schedule over the budget.
    Gaussian,
    /// `max(f) - f`.
    Maxshift,
    /// `1 - shifted, range-normalized f`.
    Normalized,
}

impl KernelArg {
    fn spec(self, budget: usize) -> Kernel64 {
        match self {
            KernelArg::Gaussian => default_kernel(budget),
            KernelArg::Maxshift => Kernel64::MaxShift,
            KernelArg::Normalized => Kernel64::Normalized {
                epsilon0: DEFAULT_EPSILON0,
            },
        }
    }
}

/// Invalid arguments; reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(message: impl fmt::Display) -> anyhow::Error {
    Usage(message.to_string()).into()
}

#[derive(Serialize)]
struct Report<'a> {
    objective: &'a str,
    variant: &'static str,
    dimension: usize,
    seed: u64,
    best_point: &'a [f64],
    best_value: f64,
    evaluations_used: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Optimize(args) => cmd_optimize(args),
        Command::Bench(args) => cmd_bench(args),
        Command::TraceDist(args) => cmd_trace_dist(args),
        Command::External(args) => cmd_external(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            eprintln!("Run `itso --help` for usage.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn benchmark(name: &str) -> Result<Benchmark> {
    Benchmark::from_name(name).map_err(usage)
}

fn resolve_box(lb: Option<f64>, ub: Option<f64>, default: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = (lb.unwrap_or(default.0), ub.unwrap_or(default.1));
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(usage(format!(
            "need finite bounds with lb < ub, got [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

fn run_config(problem: &Problem, tuning: &Tuning, default_box: (f64, f64)) -> Result<Config64> {
    if problem.dim == 0 {
        return Err(usage("--dim must be positive"));
    }
    let (lo, hi) = resolve_box(problem.lb, problem.ub, default_box)?;
    let mut config = Config64::cube(problem.dim, lo, hi, problem.budget, tuning.variant.into())
        .with_seed(problem.seed)
        .with_kernel(tuning.kernel.spec(problem.budget));
    if let Some(alpha) = tuning.alpha {
        config = config.with_alpha(alpha);
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn run_and_report<O: Objective<f64> + ?Sized>(
    name: &str,
    config: &Config64,
    objective: &mut O,
    trace_out: Option<&Path>,
) -> Result<Result64> {
    let result = optimize(config, objective)?;
    if let Some(path) = trace_out {
        write_trace(path, &result.trace)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let report = Report {
        objective: name,
        variant: config.variant.name(),
        dimension: config.dimension(),
        seed: config.seed,
        best_point: &result.best_point,
        best_value: result.best_value,
        evaluations_used: result.evaluations_used,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(result)
}

fn cmd_optimize(args: OptimizeArgs) -> Result<()> {
    let mut objective = benchmark(&args.objective)?;
    let config = run_config(
        &args.problem,
        &args.tuning,
        objective.default_box(args.problem.dim),
    )?;
    run_and_report(
        objective.name(),
        &config,
        &mut objective,
        args.trace_out.as_deref(),
    )?;
    Ok(())
}

fn cmd_external(args: ExternalArgs) -> Result<()> {
    let config = run_config(&args.problem, &args.tuning, EXTERNAL_BOX)?;
    if args.cmd.trim().is_empty() {
        return Err(usage("--cmd must name an evaluator"));
    }
    let mut evaluator =
        ExternalEvaluator::spawn(&args.cmd, Duration::from_millis(args.timeout_ms))?;
    run_and_report(
        "external",
        &config,
        &mut evaluator,
        args.trace_out.as_deref(),
    )?;
    evaluator.finish()?;
    Ok(())
}

fn parse_list<T>(list: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<Vec<_>>>()?;
    if items.is_empty() {
        return Err(usage(format!("empty list `{list}`")));
    }
    Ok(items)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let objectives = if args.functions.trim() == "all" {
        CATALOG.to_vec()
    } else {
        parse_list(&args.functions, benchmark)?
    };
    let optimizers = parse_list(&args.optimizers, |s| {
        s.parse::<OptimizerKind>().map_err(usage)
    })?;
    let p = &args.problem;
    let mut grid = Grid64::new(optimizers, objectives, p.dim, args.repeats, p.budget);
    grid.base_seed = p.seed;
    grid.alpha = args.alpha;
    grid.kernel = Some(args.kernel.spec(p.budget));
    grid.bounds = match (p.lb, p.ub) {
        (None, None) => None,
        (Some(lo), Some(hi)) => Some(resolve_box(Some(lo), Some(hi), (lo, hi))?),
        _ => return Err(usage("--lb and --ub must be given together for bench")),
    };
    grid.validate().map_err(usage)?;
    if let Some(alpha) = grid.alpha {
        if alpha < 2 {
            return Err(usage(format!("--alpha must be at least 2, got {alpha}")));
        }
    }

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let result = itso::run_grid(&grid)?;
    let written = result
        .write_artifacts(&grid, &args.out)
        .with_context(|| format!("cannot write artifacts to {}", args.out.display()))?;

    println!("optimizer,h_min");
    for (kind, h_min) in result.summary() {
        println!("{kind},{h_min:?}");
    }
    eprintln!("wrote {} files to {}", written.len(), args.out.display());
    Ok(())
}

fn cmd_trace_dist(args: TraceDistArgs) -> Result<()> {
    if args.dim != 1 {
        return Err(usage(format!(
            "trace-dist needs a 1-D objective, got --dim {}",
            args.dim
        )));
    }
    let mut objective = benchmark(&args.objective)?;
    let snapshots = parse_list(&args.snapshots, |s| {
        s.parse::<usize>()
            .map_err(|_| usage(format!("invalid snapshot `{s}`")))
    })?;
    let budget = args
        .budget
        .unwrap_or_else(|| snapshots.iter().copied().max().unwrap_or(0));
    if let Some(&bad) = snapshots.iter().find(|&&k| k < 2 || k > budget) {
        return Err(usage(format!("snapshot {bad} outside [2, {budget}]")));
    }
    let (lo, hi) = resolve_box(args.lb, args.ub, objective.default_box(1))?;
    let config = Config64::cube(1, lo, hi, budget, Variant::Full)
        .with_seed(args.seed)
        .with_kernel(args.kernel.spec(budget));
    config.validate().map_err(usage)?;

    let (_, history) = optimize_with_history(&config, &mut objective)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    for k in snapshots {
        let marginal = full_marginal(&config, &history.prefix(k), 0)
            .with_context(|| format!("cannot build the marginal at snapshot {k}"))?;
        let path = args.out.join(format!("snapshot_{k}.csv"));
        let mut out = BufWriter::new(
            fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?,
        );
        writeln!(out, "x,pdf,cdf")?;
        for i in 0..SNAPSHOT_GRID {
            let x = if i + 1 == SNAPSHOT_GRID {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (SNAPSHOT_GRID - 1) as f64
            };
            writeln!(
                out,
                "{x:?},{:?},{:?}",
                marginal.density_at(x)?,
                marginal.cdf_at(x)?
            )?;
        }
        out.flush()?;
        println!("{}", path.display());
    }
    Ok(())
}
