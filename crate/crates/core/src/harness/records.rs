use std::fs::{File, OpenOptions};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RECORDS_HEADER: [&str; 8] = [
    "dataset",
    "prob_model",
    "budget",
    "method",
    "profit",
    "seed_size",
    "time_sec",
    "rng_seed",
];

/// One (budget, method) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub prob_model: String,
    pub budget: f64,
    pub method: String,
    /// Teacher-evaluated expected profit of the selected seeds.
    pub profit: f64,
    pub seed_size: usize,
    /// Wall-clock seconds spent selecting seeds.
    pub time_sec: f64,
    pub rng_seed: u64,
}

/// Per-cell details that do not belong in the records file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub dataset: String,
    pub prob_model: String,
    pub budget: f64,
    pub method: String,
    pub profit_std_error: f64,
    pub cost_used: f64,
    /// `⌊B / max c⌋`: seeds any budget-filling method can at least afford.
    pub min_seed_bound: usize,
    /// `⌊B / min c⌋`
    pub max_seed_bound: usize,
    pub soft_objective: Option<f64>,
    pub surrogate_profit: Option<f64>,
}

/// Writes rows as CSV. With `append`, rows go after any existing content
/// and the header is only written to a new or empty file.
pub fn write_records<T: Serialize>(path: impl AsRef<Path>, rows: &[T], append: bool) -> Result<()> {
    let path = path.as_ref();
    let existing = append && path.metadata().map(|m| m.len() > 0).unwrap_or(false);
    let file = if append {
        OpenOptions::new().create(true).append(true).open(path)?
    } else {
        File::create(path)?
    };
    let mut w = csv::WriterBuilder::new().has_headers(!existing).from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RECORDS_HEADER {
        return Err(Error::Invalid(format!("unexpected records header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
