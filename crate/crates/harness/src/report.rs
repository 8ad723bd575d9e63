use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// One point of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub sweep_value: f64,
    pub method: String,
    pub theory_error: Option<f64>,
    pub empirical_error: Option<f64>,
    /// Standard error of the empirical error across seeds.
    pub stderr: Option<f64>,
    pub seconds: f64,
}

/// Provenance of a report, written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub experiment: String,
    pub sweep: String,
    pub seed: Option<u64>,
    pub seeds: usize,
    pub layout: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    /// Rows of one method, in sweep order.
    pub fn curve(&self, method: &str) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.method == method).collect()
    }

    /// The row of `method` at `sweep_value` (exact match).
    pub fn point(&self, method: &str, sweep_value: f64) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.sweep_value == sweep_value)
    }

    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }

    /// Checks that each curve's grid strictly increases and that every
    /// empirical error is a probability.
    pub fn validate(&self) -> Result<(), HarnessError> {
        for m in self.methods() {
            let grid: Vec<f64> = self.curve(&m).iter().map(|r| r.sweep_value).collect();
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(HarnessError::Invalid(format!(
                    "grid of {m} is not strictly increasing"
                )));
            }
        }
        if let Some(r) = self
            .rows
            .iter()
            .find(|r| r.empirical_error.is_some_and(|e| !(0.0..=1.0).contains(&e)))
        {
            return Err(HarnessError::Invalid(format!(
                "empirical error {:?} outside [0, 1]",
                r.empirical_error
            )));
        }
        Ok(())
    }

    /// Plain-text table for terminals.
    pub fn summary(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.5}"));
        let mut out = format!(
            "{} (sweep: {}, seeds: {}, config {})\n{:>10}  {:<20} {:>9} {:>9} {:>9} {:>9}\n",
            self.meta.experiment,
            self.meta.sweep,
            self.meta.seeds,
            self.meta.config_hash,
            "value",
            "method",
            "theory",
            "empirical",
            "stderr",
            "seconds"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>10.4}  {:<20} {:>9} {:>9} {:>9} {:>9.3}\n",
                r.sweep_value,
                r.method,
                fmt(r.theory_error),
                fmt(r.empirical_error),
                fmt(r.stderr),
                r.seconds
            ));
        }
        out
    }
}

/// Writes the rows as `sweep_value,method,theory_error,empirical_error,stderr,seconds`
/// (missing values left empty) and the metadata to `<path>.meta.toml`.
pub fn save_report(report: &ExperimentReport, path: &Path) -> Result<(), HarnessError> {
    write_rows(&report.rows, path)?;
    let meta = toml::to_string(&report.meta).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    std::fs::write(meta_path(path), meta)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<ExperimentReport, HarnessError> {
    let rows = read_rows(path)?;
    let text = std::fs::read_to_string(meta_path(path))?;
    let meta = toml::from_str(&text).map_err(|e| HarnessError::Input(e.to_string()))?;
    Ok(ExperimentReport { meta, rows })
}

pub fn write_rows(rows: &[ReportRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<ReportRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.toml");
    name.into()
}

fn csv_error(e: csv::Error) -> HarnessError {
    HarnessError::Input(e.to_string())
}
