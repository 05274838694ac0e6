//! Experiment configuration: a TOML file, command-line flags on top, defaults below.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stochknap::algorithms::{DEFAULT_FILTER_INTERVAL, DEFAULT_POPULATION_SIZE};
use stochknap::objectives::FitnessKind;

use crate::CliError;

pub const DEFAULT_ALPHAS: [f64; 3] = [0.1, 0.01, 0.001];
pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_REPETITIONS: u32 = 30;
pub const OUTPUT_DIR_ENV: &str = "STOCHKNAP_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "GSEMO")]
    Gsemo,
    #[serde(rename = "GSEMO_FILTER")]
    GsemoFilter,
    #[serde(rename = "NSGA2")]
    Nsga2,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Gsemo => "GSEMO",
            Algorithm::GsemoFilter => "GSEMO_FILTER",
            Algorithm::Nsga2 => "NSGA2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "GSEMO" => Ok(Algorithm::Gsemo),
            "GSEMO_FILTER" => Ok(Algorithm::GsemoFilter),
            "NSGA2" | "NSGA_II" => Ok(Algorithm::Nsga2),
            _ => Err(CliError::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Fitness kind with a serde representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Fitness(pub FitnessKind);

impl TryFrom<String> for Fitness {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse().map(Fitness).map_err(|e| e.to_string())
    }
}

impl From<Fitness> for String {
    fn from(f: Fitness) -> String {
        f.0.as_str().to_string()
    }
}

impl FromStr for Fitness {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse()
            .map(Fitness)
            .map_err(|_| CliError::Config(format!("unknown fitness {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    #[default]
    Chebyshev,
    Hoeffding,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Chebyshev => "chebyshev",
            BoundKind::Hoeffding => "hoeffding",
        }
    }
}

impl FromStr for BoundKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev" => Ok(BoundKind::Chebyshev),
            "hoeffding" => Ok(BoundKind::Hoeffding),
            _ => Err(CliError::Config(format!("unknown bound {s:?}"))),
        }
    }
}

/// How item dispersions are set for a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeltaRepr", into = "DeltaRepr")]
pub enum DeltaSetting {
    /// Same `delta` for every item.
    Fixed(f64),
    /// `delta_i` uniform in `[0, mu_i]`, drawn once per (instance, seed).
    Random,
    /// Keep the dispersions stored in the instance file.
    File,
}

impl DeltaSetting {
    pub fn label(&self) -> String {
        match self {
            DeltaSetting::Fixed(d) => d.to_string(),
            DeltaSetting::Random => "random".into(),
            DeltaSetting::File => "file".into(),
        }
    }
}

impl fmt::Display for DeltaSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for DeltaSetting {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(DeltaSetting::Random),
            "file" => Ok(DeltaSetting::File),
            other => match other.parse::<f64>() {
                Ok(d) if d.is_finite() && d >= 0.0 => Ok(DeltaSetting::Fixed(d)),
                _ => Err(CliError::Config(format!(
                    "dispersion must be a number >= 0, \"random\" or \"file\", got {s:?}"
                ))),
            },
        }
    }
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum DeltaRepr {
    Number(f64),
    Word(String),
}

impl TryFrom<DeltaRepr> for DeltaSetting {
    type Error = String;

    fn try_from(r: DeltaRepr) -> Result<Self, Self::Error> {
        match r {
            DeltaRepr::Number(d) => d.to_string().parse(),
            DeltaRepr::Word(w) => w.parse(),
        }
        .map_err(|e: CliError| e.to_string())
    }
}

impl From<DeltaSetting> for DeltaRepr {
    fn from(d: DeltaSetting) -> Self {
        match d {
            DeltaSetting::Fixed(v) => DeltaRepr::Number(v),
            other => DeltaRepr::Word(other.label()),
        }
    }
}

/// Fully resolved experiment description; embedded in every run record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub fitness: Vec<Fitness>,
    pub bound: BoundKind,
    pub alphas: Vec<f64>,
    pub deltas: Vec<DeltaSetting>,
    pub budget: u64,
    pub repetitions: u32,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub filter_interval: u64,
    pub population_size: usize,
    pub max_seconds: Option<f64>,
    pub workers: Option<usize>,
    pub share_population_across_deltas: bool,
}

/// Same fields as [`ExperimentConfig`], all optional, as read from a file
/// or collected from flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub instances: Option<Vec<PathBuf>>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub fitness: Option<Vec<Fitness>>,
    pub bound: Option<BoundKind>,
    pub alphas: Option<Vec<f64>>,
    pub deltas: Option<Vec<DeltaSetting>>,
    pub budget: Option<u64>,
    pub repetitions: Option<u32>,
    pub base_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub filter_interval: Option<u64>,
    pub population_size: Option<usize>,
    pub max_seconds: Option<f64>,
    pub workers: Option<usize>,
    pub share_population_across_deltas: Option<bool>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut partial: PartialConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // Relative instance paths are relative to the config file.
        if let (Some(instances), Some(dir)) = (&mut partial.instances, path.parent()) {
            for p in instances.iter_mut().filter(|p| p.is_relative()) {
                *p = dir.join(&*p);
            }
        }
        Ok(partial)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            instances: self.instances.or(base.instances),
            algorithms: self.algorithms.or(base.algorithms),
            fitness: self.fitness.or(base.fitness),
            bound: self.bound.or(base.bound),
            alphas: self.alphas.or(base.alphas),
            deltas: self.deltas.or(base.deltas),
            budget: self.budget.or(base.budget),
            repetitions: self.repetitions.or(base.repetitions),
            base_seed: self.base_seed.or(base.base_seed),
            output_dir: self.output_dir.or(base.output_dir),
            filter_interval: self.filter_interval.or(base.filter_interval),
            population_size: self.population_size.or(base.population_size),
            max_seconds: self.max_seconds.or(base.max_seconds),
            workers: self.workers.or(base.workers),
            share_population_across_deltas: self
                .share_population_across_deltas
                .or(base.share_population_across_deltas),
        }
    }

    /// Fills the remaining gaps with defaults and validates the result.
    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let output_dir = self
            .output_dir
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let config = ExperimentConfig {
            instances: self.instances.unwrap_or_default(),
            algorithms: self.algorithms.unwrap_or_else(|| vec![Algorithm::Gsemo]),
            fitness: self.fitness.unwrap_or_else(|| vec![Fitness(FitnessKind::G)]),
            bound: self.bound.unwrap_or_default(),
            alphas: self.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec()),
            deltas: self.deltas.unwrap_or_else(|| vec![DeltaSetting::File]),
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            repetitions: self.repetitions.unwrap_or(DEFAULT_REPETITIONS),
            base_seed: self.base_seed.unwrap_or(0),
            output_dir,
            filter_interval: self.filter_interval.unwrap_or(DEFAULT_FILTER_INTERVAL),
            population_size: self.population_size.unwrap_or(DEFAULT_POPULATION_SIZE),
            max_seconds: self.max_seconds,
            workers: self.workers,
            share_population_across_deltas: self.share_population_across_deltas.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.instances.is_empty() {
            return fail("no instances given".into());
        }
        if self.algorithms.is_empty() || self.fitness.is_empty() || self.deltas.is_empty() {
            return fail("algorithms, fitness kinds and dispersions must be non-empty".into());
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return fail(format!("alphas must lie in (0, 1), got {:?}", self.alphas));
        }
        if self.budget == 0 || self.repetitions == 0 {
            return fail("budget and repetitions must be at least 1".into());
        }
        if self.filter_interval == 0 {
            return fail("filter interval must be at least 1".into());
        }
        if self.algorithms.contains(&Algorithm::Nsga2) {
            if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
                return fail(format!(
                    "population size must be even and at least 4, got {}",
                    self.population_size
                ));
            }
            if self.budget < self.population_size as u64 {
                return fail("budget is smaller than the NSGA-II population".into());
            }
        }
        if let Some(s) = self.max_seconds {
            if !(s > 0.0) {
                return fail(format!("max seconds must be positive, got {s}"));
            }
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        if self.deltas.contains(&DeltaSetting::Random) {
            if self.bound == BoundKind::Hoeffding {
                return fail("the Hoeffding bound needs one dispersion shared by all items; \
                     it cannot be combined with random dispersion"
                    .into());
            }
            if self.fitness.contains(&Fitness(FitnessKind::GDoublePrime)) {
                return fail("fitness g_double_prime assumes a shared dispersion; \
                     it cannot be combined with random dispersion"
                    .into());
            }
        }
        Ok(())
    }
}
