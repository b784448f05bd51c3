use std::collections::hash_map::RandomState;
use std::fs::File;
use std::hash::{BuildHasher, Hasher};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treegini::experiments::oracle::{exact_expectation, exact_to_f64};
use treegini::experiments::{grow, Regime, MAX_EXPONENTIAL_TIME};
use treegini::report::{
    write_duality_csv, write_estimates_csv, write_limits_csv, write_oracle_csv, write_sweep_csv,
    write_tree_csv, OracleRecord, TreeSummary,
};
use treegini::{
    analytical_limits, convergence_sweep, duality_experiment, run_monte_carlo, Error, GiniVariant,
    Parallelism, RandomSource, Scenario, TreeClass,
};

#[derive(Parser)]
#[command(name = "treegini", version, about = "Degree Gini indices of random trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one tree and print its degree multiset and Gini indices.
    Simulate(SimulateArgs),
    /// Monte Carlo estimate of a class mean.
    Estimate(EstimateArgs),
    /// Analytical limiting indices.
    Limits(LimitsArgs),
    /// Compare discrete growth at n = g(t) with poissonized growth at t.
    Duality(DualityArgs),
    /// Estimates over a grid of horizons with the limit alongside.
    Sweep(SweepArgs),
    /// Exact expected index by exhaustive enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Horizon {
    /// Discrete horizon: tree order for binary classes, attachments for caterpillars.
    #[arg(long, conflicts_with = "t")]
    n: Option<u64>,
    /// Poissonized horizon (continuous time).
    #[arg(long)]
    t: Option<f64>,
    /// Spine length of caterpillar classes.
    #[arg(long, default_value_t = 10)]
    s: u64,
}

#[derive(Args)]
struct Seeding {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Draw a fresh seed instead of --seed; the seed used is reported.
    #[arg(long)]
    entropy: bool,
}

impl Seeding {
    fn resolve(&self) -> u64 {
        if self.entropy {
            RandomState::new().build_hasher().finish()
        } else {
            self.seed
        }
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report wall_ms as 0 so output is byte-identical across runs.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    class: TreeClass,
    #[command(flatten)]
    horizon: Horizon,
    #[command(flatten)]
    seeding: Seeding,
    /// Random stream within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    class: TreeClass,
    #[command(flatten)]
    horizon: Horizon,
    /// Replicate count R.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    #[arg(long, value_enum, default_value_t = GiniVariant::Topological)]
    variant: GiniVariant,
    #[command(flatten)]
    seeding: Seeding,
    /// Worker threads; output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LimitsArgs {
    /// Omit for a plain table with six decimals.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DualityArgs {
    #[arg(long, value_enum)]
    class: TreeClass,
    /// Poissonized horizon; the discrete arm runs at the size-matched n.
    #[arg(long)]
    t: f64,
    /// Spine length of caterpillar classes.
    #[arg(long, default_value_t = 10)]
    s: u64,
    /// Replicate count R per arm.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    /// Fixed part of the pass rule; 3 pooled standard errors are added.
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = GiniVariant::Topological)]
    variant: GiniVariant,
    #[command(flatten)]
    seeding: Seeding,
    /// Worker threads; output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    class: TreeClass,
    #[arg(long, value_enum, default_value_t = Regime::Discrete)]
    regime: Regime,
    /// Comma-separated horizons (n or t, by regime).
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Spine length of caterpillar classes.
    #[arg(long, default_value_t = 10)]
    s: u64,
    /// Replicate count R per grid point.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    #[arg(long, value_enum, default_value_t = GiniVariant::Topological)]
    variant: GiniVariant,
    #[command(flatten)]
    seeding: Seeding,
    /// Worker threads; output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Defaults to csv.
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    class: TreeClass,
    /// Tree order (binary classes) or attachment count (caterpillars).
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 3)]
    s: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn threads(k: Option<u64>) -> Parallelism {
    Parallelism(k.map(|k| k as usize))
}

fn check_time(class: TreeClass, t: f64) -> Outcome {
    if class != TreeClass::CaterpillarUniform && t > MAX_EXPONENTIAL_TIME {
        return Err(usage(format!("t = {t} exceeds the cap {MAX_EXPONENTIAL_TIME} for class {class}")));
    }
    Ok(())
}

fn scenario(class: TreeClass, h: &Horizon) -> Result<Scenario, Failure> {
    let sc = match (h.n, h.t) {
        (Some(n), None) => Scenario::discrete(class, n, h.s),
        (None, Some(t)) => {
            check_time(class, t)?;
            Scenario::poisson(class, t, h.s)
        }
        _ => return Err(usage("exactly one of --n or --t is required")),
    };
    sc.validate()?;
    Ok(sc)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(mut out: Box<dyn Write>, value: &T) -> Outcome {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Failure::Runtime(e.to_string()))
}

fn simulate(a: SimulateArgs) -> Outcome {
    let sc = scenario(a.class, &a.horizon)?;
    let seed = a.seeding.resolve();
    let mut rng = RandomSource::new(seed, a.stream);
    let tree = grow(&sc, &mut rng)?;
    let summary = TreeSummary::new(&sc, seed, a.stream, &tree)?;
    let out = sink(&a.output.output)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &summary),
        Format::Csv => Ok(write_tree_csv(out, &summary)?),
    }
}

fn estimate(a: EstimateArgs) -> Outcome {
    let sc = scenario(a.class, &a.horizon)?;
    if a.variant == GiniVariant::Wealth && !a.class.is_caterpillar() {
        return Err(usage("--variant wealth applies to caterpillar classes only"));
    }
    let seed = a.seeding.resolve();
    let mut record = run_monte_carlo(&sc, a.variant, a.reps, seed, threads(a.threads))?;
    if a.output.omit_timing {
        record.wall_ms = 0;
    }
    let out = sink(&a.output.output)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &record),
        Format::Csv => Ok(write_estimates_csv(out, &[record])?),
    }
}

fn limits(a: LimitsArgs) -> Outcome {
    let rows = analytical_limits()?;
    let mut out = sink(&a.output)?;
    match a.format {
        Some(Format::Json) => write_json(out, &rows),
        Some(Format::Csv) => Ok(write_limits_csv(out, &rows)?),
        None => {
            let text: String = rows
                .iter()
                .map(|r| format!("{:<20} {:.6}  {}\n", r.class, r.limit, r.source))
                .collect();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn duality(a: DualityArgs) -> Outcome {
    check_time(a.class, a.t)?;
    Scenario::poisson(a.class, a.t, a.s).validate()?;
    if a.variant == GiniVariant::Wealth && !a.class.is_caterpillar() {
        return Err(usage("--variant wealth applies to caterpillar classes only"));
    }
    let seed = a.seeding.resolve();
    let mut report =
        duality_experiment(a.class, a.s, a.t, a.reps, seed, a.tol, a.variant, threads(a.threads))?;
    if a.output.omit_timing {
        report.discrete.wall_ms = 0;
        report.poisson.wall_ms = 0;
    }
    eprintln!(
        "{} t={} n={}: discrete {:.6} (se {:.6}), poisson {:.6} (se {:.6}), |diff| {:.6} vs {:.6} -> {}",
        report.class,
        report.t,
        report.mapped_n,
        report.discrete.mean,
        report.discrete.se,
        report.poisson.mean,
        report.poisson.se,
        report.abs_diff,
        report.tolerance + 3.0 * report.pooled_se,
        if report.pass { "pass" } else { "FAIL" },
    );
    let out = sink(&a.output.output)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &report),
        Format::Csv => Ok(write_duality_csv(out, &report)?),
    }
}

fn sweep(a: SweepArgs) -> Outcome {
    for &p in &a.grid {
        let sc = Scenario { class: a.class, regime: a.regime, param: p, spine: a.s };
        if a.regime == Regime::Poisson {
            check_time(a.class, p)?;
        }
        sc.validate()?;
    }
    if a.variant == GiniVariant::Wealth && !a.class.is_caterpillar() {
        return Err(usage("--variant wealth applies to caterpillar classes only"));
    }
    let seed = a.seeding.resolve();
    let mut rows = convergence_sweep(
        a.class,
        a.regime,
        &a.grid,
        a.s,
        a.variant,
        a.reps,
        seed,
        threads(a.threads),
    )?;
    if a.output.omit_timing {
        rows.iter_mut().for_each(|r| r.record.wall_ms = 0);
    }
    let out = sink(&a.output.output)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(out, &rows),
        Format::Csv => Ok(write_sweep_csv(out, &rows)?),
    }
}

fn oracle(a: OracleArgs) -> Outcome {
    let exact = exact_expectation(a.class, a.n, a.s)?;
    let record = OracleRecord {
        class: a.class,
        n: a.n,
        spine: a.class.is_caterpillar().then_some(a.s),
        numer: *exact.numer(),
        denom: *exact.denom(),
        value: exact_to_f64(&exact),
    };
    let out = sink(&a.output)?;
    match a.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &record),
        Format::Csv => Ok(write_oracle_csv(out, &record)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Limits(a) => limits(a),
        Command::Duality(a) => duality(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `treegini --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
