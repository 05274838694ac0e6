use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stochknap::estimators::ProfitBound;
use stochknap::instances::{
    generate_bounded_strongly_correlated, generate_uncorrelated, load_instance, save_instance,
    to_canonical_string, DEFAULT_CAPACITY_RATIO, DEFAULT_CORRELATION_OFFSET,
};
use stochknap_cli::config::{
    Algorithm, BoundKind, DeltaSetting, Fitness, PartialConfig, OUTPUT_DIR_ENV,
};
use stochknap_cli::experiment::dispersed_instance;
use stochknap_cli::report::{report, ReportMode};
use stochknap_cli::{collect_run_csvs, run_experiment, RunRecord};

#[derive(Parser)]
#[command(name = "stochknap", version, about = "Chance-constrained stochastic knapsack experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a random instance.
    Generate(GenerateArgs),
    /// Run a batch of experiments and write run files plus a summary.
    Run(RunArgs),
    /// Aggregate stored run files (table) or list their populations (front).
    Report(ReportArgs),
    /// Exhaustive Pareto front or best profits of a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Uncorrelated,
    StronglyCorrelated,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "uncorrelated")]
    family: Family,
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_value: u64,
    #[arg(long, default_value_t = 1000)]
    max_value: u64,
    /// Profit minus weight for the strongly correlated family.
    #[arg(long, default_value_t = DEFAULT_CORRELATION_OFFSET)]
    offset: u64,
    #[arg(long, default_value_t = DEFAULT_CAPACITY_RATIO)]
    capacity_ratio: f64,
    /// Dispersion stored in the file: a number or "random" (drawn with --seed).
    #[arg(long, default_value = "0")]
    delta: String,
    /// Destination file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// GSEMO, GSEMO_FILTER or NSGA2.
    #[arg(long = "algorithm")]
    algorithms: Vec<String>,
    /// g, g_prime or g_double_prime.
    #[arg(long)]
    fitness: Vec<String>,
    /// chebyshev or hoeffding.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// A number, "random" (per-item in [0, mu_i]) or "file" (as stored).
    #[arg(long = "delta")]
    deltas: Vec<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    repetitions: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    filter_interval: Option<u64>,
    #[arg(long)]
    population_size: Option<usize>,
    /// Wall-clock limit for the whole batch; unfinished runs are flagged incomplete.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Parallel runs; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
    /// Run g_double_prime searches once per seed and report them under every dispersion.
    #[arg(long)]
    share_population_across_deltas: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value = "table")]
    mode: String,
    /// Run CSV files or output directories.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "g")]
    fitness: String,
    #[arg(long, default_value = "file")]
    delta: String,
    /// Seed for random dispersion.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "chebyshev")]
    bound: String,
    /// With alphas, print the best profit per alpha instead of the front.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = stochknap::oracle::MAX_ORACLE_ITEMS)]
    max_items: usize,
}

fn parse_all<T: std::str::FromStr<Err = stochknap_cli::CliError>>(v: &[String]) -> Result<Option<Vec<T>>> {
    if v.is_empty() {
        return Ok(None);
    }
    Ok(Some(v.iter().map(|s| s.parse()).collect::<Result<_, _>>()?))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let range = (args.min_value, args.max_value);
    let base = match args.family {
        Family::Uncorrelated => generate_uncorrelated::<f64>(args.n, args.seed, range, args.capacity_ratio)?,
        Family::StronglyCorrelated => generate_bounded_strongly_correlated::<f64>(
            args.n,
            args.seed,
            range,
            args.offset,
            args.capacity_ratio,
        )?,
    };
    let delta: DeltaSetting = args.delta.parse()?;
    if delta == DeltaSetting::File {
        bail!("generate takes a number or \"random\" for --delta");
    }
    let instance = dispersed_instance(&base, delta, args.seed)?;
    match args.output {
        Some(path) => save_instance(&instance, &path).with_context(|| path.display().to_string())?,
        None => std::io::stdout().write_all(to_canonical_string(&instance).as_bytes())?,
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let flags = PartialConfig {
        instances: (!args.instances.is_empty()).then_some(args.instances),
        algorithms: parse_all::<Algorithm>(&args.algorithms)?,
        fitness: parse_all::<Fitness>(&args.fitness)?,
        bound: args.bound.as_deref().map(str::parse::<BoundKind>).transpose()?,
        alphas: (!args.alphas.is_empty()).then_some(args.alphas),
        deltas: parse_all::<DeltaSetting>(&args.deltas)?,
        budget: args.budget,
        repetitions: args.repetitions,
        base_seed: args.seed,
        output_dir: args.output_dir,
        filter_interval: args.filter_interval,
        population_size: args.population_size,
        max_seconds: args.max_seconds,
        workers: args.workers,
        share_population_across_deltas: args.share_population_across_deltas.then_some(true),
    };
    let file = match &args.config {
        Some(path) => PartialConfig::from_toml_file(path)?,
        None => PartialConfig::default(),
    };
    let config = flags.over(file).resolve()?;
    let records = run_experiment(&config)?;
    let incomplete = records.iter().filter(|r| !r.sidecar.completed).count();
    log::info!(
        "wrote {} runs and the summary to {}",
        records.len(),
        config.output_dir.display()
    );
    if incomplete > 0 {
        log::warn!("{incomplete} runs hit the time limit and are excluded from the summary");
    }
    Ok(())
}

fn report_cmd(args: ReportArgs) -> Result<()> {
    let mode: ReportMode = args.mode.parse()?;
    let records = collect_run_csvs(&args.paths)?
        .iter()
        .map(|p| RunRecord::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    if records.is_empty() {
        bail!("no run files found");
    }
    std::io::stdout().write_all(&report(&records, mode)?)?;
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let base = load_instance::<f64>(&args.instance).with_context(|| args.instance.display().to_string())?;
    let instance = dispersed_instance(&base, args.delta.parse()?, args.seed)?;
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(std::io::stdout());
    if args.alphas.is_empty() {
        let kind = args.fitness.parse::<Fitness>()?.0;
        let front = stochknap::oracle::enumerate_pareto_front_up_to(&instance, kind, args.max_items)?;
        out.write_record(["first", "second", "count", "mu", "variance", "weight", "bits"])?;
        for p in &front.points {
            let s = p.solution.stats();
            out.write_record([
                p.objectives.first.to_string(),
                p.objectives.second.to_string(),
                s.count.to_string(),
                s.mu.to_string(),
                s.variance.to_string(),
                s.weight.to_string(),
                p.solution.bit_string(),
            ])?;
        }
    } else {
        let bound = match args.bound.parse::<BoundKind>()? {
            BoundKind::Chebyshev => ProfitBound::Chebyshev,
            BoundKind::Hoeffding => match ProfitBound::hoeffding_for(&instance) {
                Some(b) => b,
                None => bail!("the Hoeffding bound needs one dispersion shared by all items"),
            },
        };
        out.write_record(["alpha", "best_profit"])?;
        for &alpha in &args.alphas {
            let best = stochknap::oracle::oracle_best_profit_up_to(&instance, &bound, alpha, args.max_items)?;
            out.write_record([alpha.to_string(), best.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report_cmd(a),
        Command::Oracle(a) => oracle(a),
    }
}
