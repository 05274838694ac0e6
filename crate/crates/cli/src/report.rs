//! Report generation from stored run records.

use std::str::FromStr;

use crate::records::RunRecord;
use crate::summary::{summarize, summary_csv};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportMode {
    /// Mean/std grid, identical to the summary written by `run`.
    Table,
    /// One row per population member, for scatter plots of the trade-off.
    Front,
}

impl FromStr for ReportMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportMode::Table),
            "front" => Ok(ReportMode::Front),
            _ => Err(CliError::Config(format!("unknown report mode {s:?}"))),
        }
    }
}

pub const FRONT_HEADER: [&str; 14] = [
    "instance",
    "algorithm",
    "fitness",
    "bound",
    "delta",
    "seed",
    "count",
    "mu",
    "variance",
    "std_dev",
    "feasible",
    "valid_interval",
    "alpha_low",
    "alpha_high",
];

pub fn front_csv(records: &[RunRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let ctx = |e: csv::Error| CliError::Record(e.to_string());
    w.write_record(FRONT_HEADER).map_err(ctx)?;
    for record in records {
        let capacity = record.sidecar.capacity;
        for r in &record.rows {
            w.write_record([
                r.instance.clone(),
                r.algorithm.clone(),
                r.fitness.clone(),
                r.bound.clone(),
                r.delta.clone(),
                r.seed.to_string(),
                r.count.to_string(),
                r.mu.to_string(),
                r.variance.to_string(),
                r.variance.sqrt().to_string(),
                u8::from(r.weight <= capacity).to_string(),
                r.valid_interval.to_string(),
                r.alpha_low.to_string(),
                r.alpha_high.to_string(),
            ])
            .map_err(ctx)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Record(e.to_string()))
}

pub fn report(records: &[RunRecord], mode: ReportMode) -> Result<Vec<u8>, CliError> {
    match mode {
        ReportMode::Table => summary_csv(&summarize(records)?),
        ReportMode::Front => front_csv(records),
    }
}
