//! Batch execution of (instance, algorithm, fitness, dispersion, repetition) runs.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use stochknap::algorithms::{gsemo_run, nsga2_run, EvolutionConfig};
use stochknap::estimators::ProfitBound;
use stochknap::instances::{assign_random_dispersion, assign_uniform_dispersion, load_instance, KnapsackInstance};
use stochknap::objectives::{FitnessKind, Solution};

use crate::config::{Algorithm, BoundKind, DeltaSetting, ExperimentConfig};
use crate::records::{best_profit, population_intervals, AlphaProfit, PopulationRow, RunRecord, RunSidecar};
use crate::summary::{summarize, summary_csv};
use crate::CliError;

/// Mixed into the run seed before drawing random dispersions, so the
/// dispersion stream differs from the search stream of the same seed.
const DISPERSION_SEED_SALT: u64 = 0x5DEE_CE66_D1CE_5EED;

pub const RUNS_DIR: &str = "runs";
pub const SUMMARY_FILE: &str = "summary.csv";

/// One algorithm execution, possibly reported under several dispersions.
#[derive(Clone, Debug)]
struct Job {
    instance: usize,
    algorithm: Algorithm,
    fitness: FitnessKind,
    deltas: Vec<DeltaSetting>,
    seed: u64,
}

fn build_jobs(config: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for instance in 0..config.instances.len() {
        for &algorithm in &config.algorithms {
            for fitness in config.fitness.iter().map(|f| f.0) {
                let share = config.share_population_across_deltas
                    && fitness == FitnessKind::GDoublePrime
                    && algorithm != Algorithm::GsemoFilter;
                for rep in 0..config.repetitions {
                    let seed = config.base_seed.wrapping_add(rep as u64);
                    let delta_groups: Vec<Vec<DeltaSetting>> = if share {
                        vec![config.deltas.clone()]
                    } else {
                        config.deltas.iter().map(|&d| vec![d]).collect()
                    };
                    for deltas in delta_groups {
                        jobs.push(Job {
                            instance,
                            algorithm,
                            fitness,
                            deltas,
                            seed,
                        });
                    }
                }
            }
        }
    }
    jobs
}

pub fn dispersed_instance(
    base: &KnapsackInstance<f64>,
    delta: DeltaSetting,
    seed: u64,
) -> Result<KnapsackInstance<f64>, CliError> {
    match delta {
        DeltaSetting::Fixed(d) => Ok(assign_uniform_dispersion(base, d)?),
        DeltaSetting::Random => Ok(assign_random_dispersion(base, seed ^ DISPERSION_SEED_SALT)),
        DeltaSetting::File => Ok(base.clone()),
    }
}

fn profit_bound(kind: BoundKind, instance: &KnapsackInstance<f64>) -> Result<ProfitBound<f64>, CliError> {
    match kind {
        BoundKind::Chebyshev => Ok(ProfitBound::Chebyshev),
        BoundKind::Hoeffding => ProfitBound::hoeffding_for(instance).ok_or_else(|| {
            CliError::Config(format!(
                "instance {} has unequal dispersions; the Hoeffding bound needs a shared one",
                instance.name()
            ))
        }),
    }
}

/// Everything a finished search hands to record building.
struct SearchResult {
    population: Vec<Solution<f64>>,
    evaluations: u64,
    completed: bool,
    filter_applications: Option<u64>,
}

fn search(
    instance: &KnapsackInstance<f64>,
    job: &Job,
    bound: ProfitBound<f64>,
    config: &ExperimentConfig,
    deadline: Option<Instant>,
) -> Result<SearchResult, CliError> {
    let base = EvolutionConfig::new(job.fitness, config.budget, job.seed).with_deadline(deadline);
    Ok(match job.algorithm {
        Algorithm::Gsemo | Algorithm::GsemoFilter => {
            let cfg = if job.algorithm == Algorithm::GsemoFilter {
                base.with_filtering(config.filter_interval, bound)
            } else {
                base
            };
            let out = gsemo_run(instance, &cfg)?;
            SearchResult {
                population: out.archive.solutions(),
                evaluations: out.evaluations,
                completed: out.completed,
                filter_applications: cfg.filtering.map(|_| out.filter_applications),
            }
        }
        Algorithm::Nsga2 => {
            let out = nsga2_run(instance, &base.with_nsga2(config.population_size))?;
            SearchResult {
                population: out.population,
                evaluations: out.evaluations,
                completed: out.completed,
                filter_applications: None,
            }
        }
    })
}

fn build_record(
    instance: &KnapsackInstance<f64>,
    instance_path: &Path,
    job: &Job,
    delta: DeltaSetting,
    bound: ProfitBound<f64>,
    result: &SearchResult,
    wall_seconds: f64,
    config: &ExperimentConfig,
) -> Result<RunRecord, CliError> {
    let mut population: Vec<Solution<f64>> = result
        .population
        .iter()
        .map(|s| s.reevaluate(instance))
        .collect::<Result<_, _>>()?;
    population.sort_by(|a, b| {
        let (x, y) = (a.stats(), b.stats());
        y.mu.total_cmp(&x.mu)
            .then(x.variance.total_cmp(&y.variance))
            .then(x.weight.total_cmp(&y.weight))
            .then_with(|| a.bits().cmp(b.bits()))
    });
    let stats: Vec<_> = population.iter().map(|s| *s.stats()).collect();
    let capacity = instance.capacity();
    let intervals = population_intervals(&stats, capacity, &bound)?;
    let labels = (job.fitness.as_str(), config.bound.as_str(), delta.label());
    let rows = stats
        .iter()
        .zip(&intervals)
        .map(|(s, iv)| PopulationRow {
            instance: instance.name().to_string(),
            algorithm: job.algorithm.to_string(),
            fitness: labels.0.to_string(),
            bound: labels.1.to_string(),
            delta: labels.2.clone(),
            seed: job.seed,
            count: s.count,
            mu: s.mu,
            variance: s.variance,
            weight: s.weight,
            valid_interval: iv.is_valid() as u8,
            alpha_low: iv.alpha_low,
            alpha_high: iv.alpha_high,
        })
        .collect();
    let best_profits = config
        .alphas
        .iter()
        .map(|&alpha| {
            Ok(AlphaProfit {
                alpha,
                best_profit: best_profit(&stats, capacity, &bound, alpha)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let hoeffding_delta = match bound {
        ProfitBound::Hoeffding { delta } => Some(delta),
        ProfitBound::Chebyshev => None,
    };
    Ok(RunRecord {
        sidecar: RunSidecar {
            instance: instance.name().to_string(),
            instance_path: instance_path.to_path_buf(),
            items: instance.len(),
            capacity,
            algorithm: job.algorithm.to_string(),
            fitness: labels.0.to_string(),
            bound: labels.1.to_string(),
            delta: labels.2,
            hoeffding_delta,
            seed: job.seed,
            budget: config.budget,
            evaluations: result.evaluations,
            completed: result.completed,
            wall_seconds,
            filter_applications: result.filter_applications,
            best_profits,
            solutions: population.iter().map(Solution::bit_string).collect(),
            config: config.clone(),
        },
        rows,
    })
}

fn execute(
    job: &Job,
    bases: &[KnapsackInstance<f64>],
    config: &ExperimentConfig,
    deadline: Option<Instant>,
) -> Result<Vec<RunRecord>, CliError> {
    let base = &bases[job.instance];
    let path = &config.instances[job.instance];
    let started = Instant::now();
    let search_instance = dispersed_instance(base, job.deltas[0], job.seed)?;
    let search_bound = profit_bound(config.bound, &search_instance)?;
    if job.fitness == FitnessKind::GDoublePrime && search_instance.uniform_delta().is_none() {
        warn!(
            "{}: fitness g_double_prime with unequal dispersions ranks solutions by item count only",
            search_instance.name()
        );
    }
    let result = search(&search_instance, job, search_bound, config, deadline)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    let mut records = Vec::with_capacity(job.deltas.len());
    for &delta in &job.deltas {
        let instance = dispersed_instance(base, delta, job.seed)?;
        let bound = profit_bound(config.bound, &instance)?;
        records.push(build_record(&instance, path, job, delta, bound, &result, wall_seconds, config)?);
    }
    info!(
        "{} {} {} seed {}: {} evaluations in {:.2}s{}",
        base.name(),
        job.algorithm,
        job.fitness,
        job.seed,
        result.evaluations,
        wall_seconds,
        if result.completed { "" } else { " (stopped at time limit)" }
    );
    Ok(records)
}

/// Runs every configured cell, writes one CSV + JSON pair per run under
/// `<output>/runs` and the aggregate table to `<output>/summary.csv`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, CliError> {
    config.validate()?;
    let bases = config
        .instances
        .iter()
        .map(|p| load_instance::<f64>(p).map_err(|e| CliError::Instance(p.clone(), e)))
        .collect::<Result<Vec<_>, _>>()?;
    // Dispersion checks up front, so a bad pairing fails before any work.
    for base in &bases {
        for &delta in &config.deltas {
            let inst = dispersed_instance(base, delta, config.base_seed)?;
            if delta != DeltaSetting::Random {
                profit_bound(config.bound, &inst)?;
            }
        }
    }
    let runs_dir = config.output_dir.join(RUNS_DIR);
    std::fs::create_dir_all(&runs_dir).map_err(|e| CliError::io(&runs_dir, e))?;

    let jobs = build_jobs(config);
    let deadline = config
        .max_seconds
        .map(|s| Instant::now() + Duration::from_secs_f64(s));
    let workers = config
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    info!("{} runs on {} workers", jobs.len(), workers);

    let batches: Vec<Vec<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let records = execute(job, &bases, config, deadline)?;
                for r in &records {
                    r.write(&runs_dir)?;
                }
                Ok(records)
            })
            .collect::<Result<_, CliError>>()
    })?;
    let records: Vec<RunRecord> = batches.into_iter().flatten().collect();

    let summary = summary_csv(&summarize(&records)?)?;
    crate::records::write_atomic(&config.output_dir.join(SUMMARY_FILE), &summary)?;
    Ok(records)
}

/// Run CSVs found at `paths`; directories contribute their `runs/` (or own)
/// `*.csv` files other than the summary, sorted by name.
pub fn collect_run_csvs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let dir = if p.join(RUNS_DIR).is_dir() { p.join(RUNS_DIR) } else { p.clone() };
            let mut found: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| CliError::io(&dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.extension().is_some_and(|x| x == "csv")
                        && f.file_name().is_some_and(|n| n != SUMMARY_FILE)
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}
