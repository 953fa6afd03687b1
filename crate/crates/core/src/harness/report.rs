use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Value {
    /// Floats carry 17 significant digits so the CSV round-trips bit for bit.
    pub fn render(&self) -> String {
        match self {
            Value::Float(x) => format!("{x:.16e}"),
            Value::Int(i) => i.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Float(x) => Some(x),
            Value::Int(i) => Some(i as f64),
            Value::Text(_) => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// Measured quantity, its threshold and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(criterion: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { criterion: criterion.into(), measured, threshold, pass: measured <= threshold }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(criterion: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { criterion: criterion.into(), measured, threshold, pass: measured >= threshold }
    }

    /// Passes when `measured` lies in `[lo, hi]`; the recorded threshold is `hi`.
    pub fn within(criterion: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self { criterion: criterion.into(), measured, threshold: hi, pass: (lo..=hi).contains(&measured) }
    }
}

/// Tabular rows with fixed columns plus the summary checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(kind: &'static str, columns: &'static [&'static str]) -> Self {
        Self { kind, columns, rows: Vec::new(), checks: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.kind);
        self.rows.push(row);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn find(&self, criterion: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.criterion == criterion)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("checks serialize")
    }
}

/// Writes `<kind>.csv` and `<kind>.json` into `dir` and returns both paths.
pub fn write_report(report: &Report, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.kind));
    let json_path = dir.join(format!("{}.json", report.kind));
    fs::write(&csv_path, report.to_csv()?)?;
    fs::write(&json_path, report.summary_json())?;
    Ok((csv_path, json_path))
}
