//! Per-run result files: a population CSV and a JSON sidecar with the
//! configuration and extracted best profits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochknap::estimators::{confidence_intervals, ConfidenceInterval, ProfitBound};
use stochknap::objectives::SolutionStats;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const RUN_CSV_HEADER: [&str; 13] = [
    "instance",
    "algorithm",
    "fitness",
    "bound",
    "delta",
    "seed",
    "count",
    "mu",
    "variance",
    "weight",
    "valid_interval",
    "alpha_low",
    "alpha_high",
];

/// One final-population member as stored in a run CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationRow {
    pub instance: String,
    pub algorithm: String,
    pub fitness: String,
    pub bound: String,
    pub delta: String,
    pub seed: u64,
    pub count: usize,
    pub mu: f64,
    pub variance: f64,
    pub weight: f64,
    pub valid_interval: u8,
    pub alpha_low: f64,
    pub alpha_high: f64,
}

impl PopulationRow {
    pub fn stats(&self) -> SolutionStats<f64> {
        SolutionStats {
            mu: self.mu,
            variance: self.variance,
            weight: self.weight,
            count: self.count,
        }
    }

    fn fields(&self) -> [String; 13] {
        [
            self.instance.clone(),
            self.algorithm.clone(),
            self.fitness.clone(),
            self.bound.clone(),
            self.delta.clone(),
            self.seed.to_string(),
            self.count.to_string(),
            self.mu.to_string(),
            self.variance.to_string(),
            self.weight.to_string(),
            self.valid_interval.to_string(),
            self.alpha_low.to_string(),
            self.alpha_high.to_string(),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaProfit {
    pub alpha: f64,
    /// `None` when the final population holds no feasible solution.
    pub best_profit: Option<f64>,
}

/// Everything about one run except its population rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSidecar {
    pub instance: String,
    pub instance_path: PathBuf,
    pub items: usize,
    pub capacity: f64,
    pub algorithm: String,
    pub fitness: String,
    pub bound: String,
    pub delta: String,
    /// Shared dispersion used by the Hoeffding bound.
    pub hoeffding_delta: Option<f64>,
    pub seed: u64,
    pub budget: u64,
    pub evaluations: u64,
    /// False when the wall-clock limit stopped the run early.
    pub completed: bool,
    pub wall_seconds: f64,
    pub filter_applications: Option<u64>,
    pub best_profits: Vec<AlphaProfit>,
    /// Bit strings of the population, item 0 first, in CSV row order.
    pub solutions: Vec<String>,
    pub config: ExperimentConfig,
}

impl RunSidecar {
    pub fn profit_bound(&self) -> Result<ProfitBound<f64>, CliError> {
        match (self.bound.as_str(), self.hoeffding_delta) {
            ("chebyshev", _) => Ok(ProfitBound::Chebyshev),
            ("hoeffding", Some(delta)) => Ok(ProfitBound::Hoeffding { delta }),
            (b, _) => Err(CliError::Record(format!("unusable bound {b:?} in run record"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub sidecar: RunSidecar,
    pub rows: Vec<PopulationRow>,
}

impl RunRecord {
    /// File stem shared by the CSV and the sidecar.
    pub fn file_stem(&self) -> String {
        let s = &self.sidecar;
        let stem = format!(
            "{}__{}__{}__{}__d{}__s{}",
            s.instance, s.algorithm, s.fitness, s.bound, s.delta, s.seed
        );
        stem.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let ctx = |e: csv::Error| CliError::Record(e.to_string());
        w.write_record(RUN_CSV_HEADER).map_err(ctx)?;
        for row in &self.rows {
            w.write_record(row.fields()).map_err(ctx)?;
        }
        w.into_inner().map_err(|e| CliError::Record(e.to_string()))
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`, each atomically.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let stem = self.file_stem();
        let csv_path = dir.join(format!("{stem}.csv"));
        write_atomic(&csv_path, &self.to_csv()?)?;
        let json = serde_json::to_vec_pretty(&self.sidecar)
            .map_err(|e| CliError::Record(e.to_string()))?;
        write_atomic(&dir.join(format!("{stem}.json")), &json)?;
        Ok(csv_path)
    }

    /// Reads a run CSV and the sidecar next to it.
    pub fn load(csv_path: &Path) -> Result<Self, CliError> {
        let json_path = csv_path.with_extension("json");
        let json = std::fs::read(&json_path).map_err(|e| CliError::io(&json_path, e))?;
        let sidecar: RunSidecar = serde_json::from_slice(&json)
            .map_err(|e| CliError::Record(format!("{}: {e}", json_path.display())))?;
        let mut reader = csv::Reader::from_path(csv_path)
            .map_err(|e| CliError::Record(format!("{}: {e}", csv_path.display())))?;
        let header = reader
            .headers()
            .map_err(|e| CliError::Record(format!("{}: {e}", csv_path.display())))?;
        if header.iter().ne(RUN_CSV_HEADER) {
            return Err(CliError::Record(format!(
                "{}: unexpected header {:?}",
                csv_path.display(),
                header
            )));
        }
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<PopulationRow>, _>>()
            .map_err(|e| CliError::Record(format!("{}: {e}", csv_path.display())))?;
        Ok(RunRecord { sidecar, rows })
    }

    /// Best estimate per alpha recomputed from the rows alone.
    pub fn recompute_best_profits(&self) -> Result<Vec<AlphaProfit>, CliError> {
        let bound = self.sidecar.profit_bound()?;
        let stats: Vec<SolutionStats<f64>> = self.rows.iter().map(PopulationRow::stats).collect();
        let capacity = self.sidecar.capacity;
        self.sidecar
            .best_profits
            .iter()
            .map(|ap| {
                Ok(AlphaProfit {
                    alpha: ap.alpha,
                    best_profit: best_profit(&stats, capacity, &bound, ap.alpha)?,
                })
            })
            .collect()
    }
}

/// Highest estimate among the feasible entries of `stats`, if any.
pub fn best_profit(
    stats: &[SolutionStats<f64>],
    capacity: f64,
    bound: &ProfitBound<f64>,
    alpha: f64,
) -> Result<Option<f64>, CliError> {
    let mut best: Option<f64> = None;
    for s in stats.iter().filter(|s| s.is_feasible(capacity)) {
        let p = bound.profit(s, alpha).map_err(|e| CliError::Record(e.to_string()))?;
        best = Some(best.map_or(p, |b| b.max(p)));
    }
    Ok(best)
}

/// Confidence intervals of every entry: feasible entries are ranked among
/// themselves, infeasible ones get the empty interval.
pub fn population_intervals(
    stats: &[SolutionStats<f64>],
    capacity: f64,
    bound: &ProfitBound<f64>,
) -> Result<Vec<ConfidenceInterval<f64>>, CliError> {
    let feasible: Vec<usize> = (0..stats.len()).filter(|&i| stats[i].is_feasible(capacity)).collect();
    let feasible_stats: Vec<SolutionStats<f64>> = feasible.iter().map(|&i| stats[i]).collect();
    let ranked = confidence_intervals(&feasible_stats, bound).map_err(|e| CliError::Record(e.to_string()))?;
    let mut out = vec![ConfidenceInterval::empty(); stats.len()];
    for (&i, iv) in feasible.iter().zip(ranked) {
        out[i] = iv;
    }
    Ok(out)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
