//! Run reports: `report.json` plus one CSV per curve.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mwl_core::{Error, Result};
use serde::Serialize;

/// Stated in every report.
pub const ASYMPTOTIC_NOTE: &str = "the limit theorems are asymptotic; at n <= 4096 only the \
trend and threshold checks below are reproducible, not the limits themselves";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Criterion {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A table with `n` as first column.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub n: Vec<usize>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Curve {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            n: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, n: usize, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width of curve {}",
            self.name
        );
        self.n.push(n);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Header row, `n` first, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (n, row) in self.n.iter().zip(&self.rows) {
            let _ = write!(out, "{n}");
            for x in row {
                let _ = write!(out, ",{x:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub runner: String,
    pub steplaw: String,
    pub config_hash: String,
    pub seed: u64,
    pub replicas: usize,
    pub paths: usize,
    pub grid: Vec<usize>,
    pub wall_time_s: f64,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
    pub curves: Vec<Curve>,
    /// Scalar results (estimates and their standard errors).
    pub values: serde_json::Map<String, serde_json::Value>,
    pub golden: Option<String>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(runner: &str, steplaw: &str, config_hash: &str, seed: u64) -> Self {
        RunReport {
            runner: runner.to_string(),
            steplaw: steplaw.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            replicas: 0,
            paths: 0,
            grid: Vec::new(),
            wall_time_s: 0.0,
            passed: true,
            criteria: Vec::new(),
            curves: Vec::new(),
            values: serde_json::Map::new(),
            golden: None,
            notes: vec![ASYMPTOTIC_NOTE.to_string()],
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.criteria.push(Criterion::new(name, passed, detail));
        self.passed = self.criteria.iter().all(|c| c.passed);
    }

    pub fn value(&mut self, key: &str, v: f64) {
        let json = serde_json::Number::from_f64(v)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(format!("{v}")));
        self.values.insert(key.to_string(), json);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key)?.as_f64()
    }

    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Writes `report.json` and the curve CSVs; returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |e: std::io::Error, p: &Path| Error::Usage(format!("{}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        let mut written = Vec::new();
        for c in &self.curves {
            let p = dir.join(c.file_name());
            std::fs::write(&p, c.to_csv()).map_err(|e| io(e, &p))?;
            written.push(p);
        }
        let p = dir.join("report.json");
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(&p, json + "\n").map_err(|e| io(e, &p))?;
        written.push(p);
        Ok(written)
    }

    /// One line per criterion.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(
                out,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Curve::new("wlln", &["mean", "se"]);
        c.push(1, vec![0.1, 0.0]);
        c.push(2, vec![-1.0 / 3.0, 1e-300]);
        let csv = c.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,mean,se");
        assert_eq!(lines[1], "1,1.0000000000000001e-1,0.0000000000000000e0");
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, -1.0 / 3.0);
    }

    #[test]
    fn pass_state_follows_criteria() {
        let mut r = RunReport::new("x", "diag2", "h", 0);
        r.check("a", true, "");
        assert!(r.passed);
        r.check("b", false, "");
        assert!(!r.passed);
        assert!(r.summary().contains("FAIL b"));
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = RunReport::new("x", "diag2", "h", 0);
        r.curves.push(Curve::new("c", &["v"]));
        r.value("nan", f64::NAN);
        let files = r.write(dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
                .unwrap();
        assert_eq!(json["runner"], "x");
        assert!(json["notes"][0].as_str().unwrap().contains("asymptotic"));
    }
}
