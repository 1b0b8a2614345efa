//! Residual reports and their JSON, CSV and human-readable renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::GeoError;

/// Residual at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub point: Vec<f64>,
    pub residual: f64,
}

/// One named check: residual statistics against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub paper_anchor: String,
    pub grid: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub samples: Vec<Sample>,
}

impl Check {
    /// Builds the record from per-point residuals. Statistics are reduced in
    /// sample order so they do not depend on how the samples were computed.
    pub fn from_samples(name: &str, anchor: &str, grid: &str, tolerance: f64, samples: Vec<Sample>) -> Self {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut finite = !samples.is_empty();
        for s in &samples {
            if !s.residual.is_finite() {
                finite = false;
            }
            max = max.max(s.residual);
            sum += s.residual;
        }
        let (max, mean) = if finite {
            (max, sum / samples.len() as f64)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Self {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            grid: grid.to_string(),
            max_residual: max,
            mean_residual: mean,
            tolerance,
            pass: finite && max <= tolerance,
            samples,
        }
    }

    /// A check with a single residual and no grid.
    pub fn scalar(name: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self::from_samples(
            name,
            anchor,
            "single value",
            tolerance,
            vec![Sample {
                point: Vec::new(),
                residual,
            }],
        )
    }

    /// A negative control: the probed identity must be violated by at least
    /// `floor`. The residual is `floor / observed`, so the record passes
    /// against tolerance 1 exactly when `observed ≥ floor`.
    pub fn control(name: &str, anchor: &str, observed: f64, floor: f64) -> Self {
        let ratio = if observed > 0.0 {
            floor / observed
        } else {
            f64::INFINITY
        };
        Self::from_samples(
            name,
            anchor,
            &format!("negative control: observed {observed:e}, floor {floor:e}"),
            1.0,
            vec![Sample {
                point: Vec::new(),
                residual: ratio,
            }],
        )
    }

    /// A failed record standing in for an operation that returned an error.
    pub fn failed(name: &str, anchor: &str, tolerance: f64, err: &GeoError) -> Self {
        Self {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            grid: format!("error: {err}"),
            max_residual: f64::INFINITY,
            mean_residual: f64::INFINITY,
            tolerance,
            pass: false,
            samples: Vec::new(),
        }
    }

    /// Builds from per-point results, turning the first error into a failed
    /// record.
    pub fn from_results(
        name: &str,
        anchor: &str,
        grid: &str,
        tolerance: f64,
        results: Vec<(Vec<f64>, crate::Result<f64>)>,
    ) -> Self {
        let mut samples = Vec::with_capacity(results.len());
        for (point, r) in results {
            match r {
                Ok(residual) => samples.push(Sample { point, residual }),
                Err(e) => return Self::failed(name, anchor, tolerance, &e),
            }
        }
        Self::from_samples(name, anchor, grid, tolerance, samples)
    }
}

/// A collection of checks plus an echo of the run configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    passed: usize,
    failed: usize,
    all_pass: bool,
}

#[derive(Serialize)]
struct Document<'a> {
    config: &'a BTreeMap<String, String>,
    checks: &'a [Check],
    summary: Summary,
}

/// Output format of [`Report::emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            other => Err(format!("unknown format `{other}` (json, csv, human)")),
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        "inf".to_string()
    }
}

impl Report {
    pub fn new(config: BTreeMap<String, String>) -> Self {
        Self {
            config,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Sorts records by name (stable), fixing the output order.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Human => self.to_human(),
        }
    }

    pub fn to_json(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let doc = Document {
            config: &self.config,
            checks: &self.checks,
            summary: Summary {
                total: self.checks.len(),
                passed,
                failed: self.checks.len() - passed,
                all_pass: self.all_pass(),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report is serializable");
        s.push('\n');
        s
    }

    /// One row per (check, grid point); the point is space-separated.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,index,point,residual\n");
        for c in &self.checks {
            for (i, sample) in c.samples.iter().enumerate() {
                let point: Vec<String> = sample.point.iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(s, "{},{},{},{}", c.name, i, point.join(" "), sample.residual);
            }
        }
        s
    }

    pub fn to_human(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>10}  {:>10}  {:>10}  status",
            "check", "max", "mean", "tol"
        );
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<width$}  {:>10}  {:>10}  {:>10}  {}",
                c.name,
                fmt_num(c.max_residual),
                fmt_num(c.mean_residual),
                fmt_num(c.tolerance),
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "{passed}/{} checks passed", self.checks.len());
        s
    }
}
