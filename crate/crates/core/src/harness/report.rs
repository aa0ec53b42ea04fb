use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::fit::RateFit;
use super::svg::loglog_svg;
use super::HarnessError;
use crate::domain::io::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Sampled series, fit and checks of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    /// Column names of `rows`; the first column is time or the swept parameter.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fit: Option<RateFit>,
    pub predicted_exponent: Option<f64>,
    pub metrics: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
}

impl ExperimentReport {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fit: None,
            predicted_exponent: None,
            metrics: BTreeMap::new(),
            assertions: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    pub(crate) fn assert(&mut self, name: &str, passed: bool, detail: String) {
        self.assertions.push(Assertion::new(name, passed, detail));
    }

    pub(crate) fn set(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }
}

/// Writes `<name>.csv`, `<name>.json` and, when the first two columns are
/// positive, `<name>.svg`. Returns the paths written.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();

    let csv = dir.join(format!("{}.csv", report.name));
    let mut out = std::io::BufWriter::new(fs::File::create(&csv)?);
    writeln!(out, "{}", report.columns.join(","))?;
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    files.push(csv);

    let json = dir.join(format!("{}.json", report.name));
    fs::write(&json, serde_json::to_string_pretty(report).map_err(std::io::Error::other)?)?;
    files.push(json);

    if report.columns.len() >= 2 {
        let points: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| (r[0], r[1]))
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .collect();
        if points.len() >= 2 {
            let svg = dir.join(format!("{}.svg", report.name));
            let title = format!("{}: {} vs {}", report.name, report.columns[1], report.columns[0]);
            fs::write(&svg, loglog_svg(&title, &points, report.fit.as_ref()))?;
            files.push(svg);
        }
    }
    Ok(files)
}
