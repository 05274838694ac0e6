//! Mean and standard deviation of the best profit per table cell.

use statrs::statistics::Statistics;

use crate::records::RunRecord;
use crate::CliError;

pub const SUMMARY_HEADER: [&str; 10] = [
    "instance", "B", "algorithm", "fitness", "bound", "delta", "alpha", "mean_best", "std_best", "reps",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub capacity: f64,
    pub algorithm: String,
    pub fitness: String,
    pub bound: String,
    pub delta: String,
    pub alpha: f64,
    pub mean_best: f64,
    /// Sample standard deviation; 0 for fewer than two runs.
    pub std_best: f64,
    pub reps: usize,
}

type CellKey = (String, u64, String, String, String, String, u64);

/// Aggregates completed runs with a feasible best profit. Cells are ordered
/// by instance, algorithm, fitness, bound and dispersion label, alphas in
/// the order the runs list them. Best profits are recomputed from the rows.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>, CliError> {
    let mut order: Vec<&RunRecord> = records.iter().collect();
    order.sort_by(|a, b| {
        let key = |r: &RunRecord| {
            let s = &r.sidecar;
            (s.instance.clone(), s.algorithm.clone(), s.fitness.clone(), s.bound.clone(), s.delta.clone(), s.seed)
        };
        key(a).cmp(&key(b))
    });
    let mut cells: Vec<(CellKey, SummaryRow, Vec<f64>)> = Vec::new();
    for record in order {
        let s = &record.sidecar;
        for ap in record.recompute_best_profits()? {
            let key: CellKey = (
                s.instance.clone(),
                s.capacity.to_bits(),
                s.algorithm.clone(),
                s.fitness.clone(),
                s.bound.clone(),
                s.delta.clone(),
                ap.alpha.to_bits(),
            );
            let pos = match cells.iter().position(|(k, _, _)| *k == key) {
                Some(p) => p,
                None => {
                    let row = SummaryRow {
                        instance: s.instance.clone(),
                        capacity: s.capacity,
                        algorithm: s.algorithm.clone(),
                        fitness: s.fitness.clone(),
                        bound: s.bound.clone(),
                        delta: s.delta.clone(),
                        alpha: ap.alpha,
                        mean_best: f64::NAN,
                        std_best: f64::NAN,
                        reps: 0,
                    };
                    cells.push((key, row, Vec::new()));
                    cells.len() - 1
                }
            };
            if let (true, Some(p)) = (s.completed, ap.best_profit) {
                cells[pos].2.push(p);
            }
        }
    }
    Ok(cells
        .into_iter()
        .map(|(_, mut row, values)| {
            row.reps = values.len();
            row.mean_best = if values.is_empty() { f64::NAN } else { values.iter().mean() };
            row.std_best = if values.len() < 2 { 0.0 } else { values.iter().std_dev() };
            row
        })
        .collect())
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let ctx = |e: csv::Error| CliError::Record(e.to_string());
    w.write_record(SUMMARY_HEADER).map_err(ctx)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.capacity.to_string(),
            r.algorithm.clone(),
            r.fitness.clone(),
            r.bound.clone(),
            r.delta.clone(),
            r.alpha.to_string(),
            r.mean_best.to_string(),
            r.std_best.to_string(),
            r.reps.to_string(),
        ])
        .map_err(ctx)?;
    }
    w.into_inner().map_err(|e| CliError::Record(e.to_string()))
}
