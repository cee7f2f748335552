//! Check reports and the machine-readable run document.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// One measured residual inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub label: String,
    pub residual: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

impl Finding {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub tol: f64,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default)]
    pub findings: Vec<Finding>,
    pub wall_time_ms: f64,
}

impl Report {
    /// Report for a check that could not run.
    pub fn error(check: impl Into<String>, tol: f64, message: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            status: Status::Error,
            tol,
            max_residual: f64::MAX,
            witness: None,
            message: Some(message.into()),
            findings: Vec::new(),
            wall_time_ms: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn finding(&self, label: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.label == label)
    }

    /// Copy with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Accumulates findings in insertion order and produces a [`Report`].
#[derive(Debug)]
pub struct ReportBuilder {
    check: String,
    tol: f64,
    findings: Vec<Finding>,
    message: Option<String>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(check: impl Into<String>, tol: f64) -> Self {
        Self {
            check: check.into(),
            tol,
            findings: Vec::new(),
            message: None,
            started: Instant::now(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, residual: f64, witness: Option<Vec<f64>>) {
        let tol = self.tol;
        self.push_with_tol(label, residual, tol, witness);
    }

    pub fn push_with_tol(
        &mut self,
        label: impl Into<String>,
        residual: f64,
        tol: f64,
        witness: Option<Vec<f64>>,
    ) {
        let residual = if residual.is_nan() {
            f64::MAX
        } else {
            residual.min(f64::MAX)
        };
        self.findings.push(Finding {
            label: label.into(),
            residual,
            tol,
            witness,
        });
    }

    pub fn note(&mut self, message: impl Into<String>) {
        self.message = Some(message.into());
    }

    pub fn finish(self) -> Report {
        let worst = self
            .findings
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (k, f)| match acc {
                Some((_, r)) if r >= f.residual => acc,
                _ => Some((k, f.residual)),
            });
        let pass = self.findings.iter().all(Finding::passed);
        let failing = self
            .findings
            .iter()
            .filter(|f| !f.passed())
            .max_by(|a, b| a.residual.total_cmp(&b.residual));
        Report {
            check: self.check,
            status: if pass { Status::Pass } else { Status::Fail },
            tol: self.tol,
            max_residual: worst.map_or(0.0, |(_, r)| r),
            witness: failing.and_then(|f| f.witness.clone()),
            message: self.message,
            findings: self.findings,
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// Machine-readable record of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub subject: String,
    pub seed: u64,
    pub samples: usize,
    pub reports: Vec<Report>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn without_timing(&self) -> Self {
        Self {
            reports: self.reports.iter().map(Report::without_timing).collect(),
            ..self.clone()
        }
    }
}

/// Plain-text table, one row per report.
pub fn render_table(reports: &[Report]) -> String {
    let mut out = String::new();
    let width = reports
        .iter()
        .map(|r| r.check.len())
        .max()
        .unwrap_or(11)
        .max(11);
    let _ = writeln!(
        out,
        "{:<width$}  {:<6}  {:>12}  {:>10}  {:>10}",
        "check", "status", "max residual", "tol", "time ms"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:<6}  {:>12.3e}  {:>10.1e}  {:>10.1}",
            r.check,
            r.status.to_string(),
            r.max_residual,
            r.tol,
            r.wall_time_ms
        );
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "{:<width$}    witness {:?}", "", w);
        }
        if let Some(m) = &r.message {
            let _ = writeln!(out, "{:<width$}    {}", "", m);
        }
    }
    out
}
