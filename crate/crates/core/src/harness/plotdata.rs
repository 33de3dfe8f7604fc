use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::records::RECORDS_HEADER;

const METRICS: [&str; 3] = ["profit", "seed_size", "time_sec"];

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

/// Splits a records CSV into one tidy `budget,method,value` file per
/// (dataset, prob_model, metric). Values are copied verbatim. Returns the
/// written paths in order of first appearance.
pub fn cmd_plotdata(records_csv: impl AsRef<Path>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    let mut reader = csv::Reader::from_path(records_csv.as_ref())?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RECORDS_HEADER {
        return Err(Error::Invalid(format!("unexpected records header {header:?}")));
    }
    let col = |name: &str| RECORDS_HEADER.iter().position(|h| *h == name).expect("known column");

    // (dataset, prob_model) -> rows of raw fields
    let mut groups: Vec<((String, String), Vec<csv::StringRecord>)> = Vec::new();
    for row in reader.records() {
        let row = row?;
        let key = (row[col("dataset")].to_string(), row[col("prob_model")].to_string());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    if groups.is_empty() {
        return Err(Error::Invalid(format!("{} has no records", records_csv.as_ref().display())));
    }

    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for ((dataset, prob_model), rows) in &groups {
        for metric in METRICS {
            let path = out_dir.join(format!("{}__{}__{metric}.csv", file_safe(dataset), file_safe(prob_model)));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["budget", "method", "value"])?;
            for row in rows {
                w.write_record([&row[col("budget")], &row[col("method")], &row[col(metric)]])?;
            }
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}
