//! Experiment reports and their JSON/CSV serialization.
//!
//! Floats are written with 17 significant digits so every value round-trips.
//! Wall time is kept out of the artifacts so that they are byte-identical
//! across runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::stats::Fit;
use crate::error::{Error, Result};

/// A named scalar, either exact or with a standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub exact: bool,
}

impl Estimate {
    pub fn exact(name: &str, value: f64) -> Self {
        Estimate { name: name.into(), value, stderr: None, exact: true }
    }

    pub fn with_stderr(name: &str, value: f64, stderr: f64) -> Self {
        Estimate { name: name.into(), value, stderr: Some(stderr), exact: false }
    }
}

/// Rows of numbers; columns ending in `_stderr` carry the errors of their neighbours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: Fit,
}

/// One pass/fail check with the measured value and the rule it was held to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub rule: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    /// Every parameter, defaults materialized.
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub tables: Vec<Table>,
    pub estimates: Vec<Estimate>,
    pub fits: Vec<NamedFit>,
    pub criteria: Vec<Criterion>,
    /// Free-form structured findings (e.g. the selected convention).
    pub findings: Value,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(name: &str, parameters: &impl Serialize, seeds: Vec<u64>) -> Self {
        ExperimentReport {
            name: name.into(),
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            seeds,
            tables: Vec::new(),
            estimates: Vec::new(),
            fits: Vec::new(),
            criteria: Vec::new(),
            findings: Value::Null,
            wall_time_s: 0.0,
        }
    }

    pub fn check(&mut self, name: &str, value: f64, rule: String, pass: bool) {
        self.criteria.push(Criterion { name: name.into(), value, rule, pass });
    }

    pub fn fit(&mut self, name: &str, fit: Fit) {
        self.fits.push(NamedFit { name: name.into(), fit });
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).unwrap_or(Value::Null);
        let mut out = String::new();
        write_json(&v, 0, &mut out);
        out.push('\n');
        out
    }

    /// Long-format CSV of every table: `table,row,column,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,row,column,value\n");
        for t in &self.tables {
            for (i, r) in t.rows.iter().enumerate() {
                for (c, v) in t.columns.iter().zip(r) {
                    let _ = writeln!(out, "{},{},{},{}", t.name, i, c, fmt_f64(*v));
                }
            }
        }
        out
    }

    /// Hash naming the artifacts: seeds plus canonical parameters.
    pub fn seedhash(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.seeds {
            h.update(s.to_le_bytes());
        }
        let mut p = String::new();
        write_json(&self.parameters, 0, &mut p);
        h.update(p.as_bytes());
        h.finalize().iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// Writes `{name}-{seedhash}.json` and `.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        let stem = format!("{}-{}", self.name, self.seedhash());
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        for (p, body) in [(&json, self.to_json()), (&csv, self.to_csv())] {
            std::fs::write(p, body).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
        }
        Ok((json, csv))
    }
}

/// 17 significant digits; non-finite values as `NaN`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&fmt_f64(x));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            // Numeric rows stay on one line.
            if a.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// JSON text of any serializable value in the report style.
pub fn to_json_string(v: &impl Serialize) -> String {
    let v = serde_json::to_value(v).unwrap_or(Value::Null);
    let mut out = String::new();
    write_json(&v, 0, &mut out);
    out.push('\n');
    out
}
