//! Command reports: human text on stdout, JSON via `--report-out`.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use zpreal_core::CheckReport;

use crate::error::{CliError, CliResult};
use crate::format::sci;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Value {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub facts: Vec<(String, String)>,
    pub values: Vec<Value>,
    pub checks: Vec<CheckEntry>,
    /// Only with `--timing`, and never in the text form, which must stay
    /// byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            passed: true,
            facts: Vec::new(),
            values: Vec::new(),
            checks: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn fact(&mut self, name: &str, value: impl ToString) {
        self.facts.push((name.to_string(), value.to_string()));
    }

    pub fn value(&mut self, name: &str, value: f64) {
        self.values.push(Value {
            name: name.to_string(),
            value,
        });
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let passed = residual <= tol;
        self.passed &= passed;
        self.checks.push(CheckEntry {
            name: name.into(),
            residual,
            tol,
            passed,
        });
    }

    /// Adds every check of `r`, named `prefix/<check>`.
    pub fn absorb(&mut self, prefix: &str, r: &CheckReport) {
        for c in &r.checks {
            self.check(format!("{prefix}/{}", c.name), c.residual, c.tol);
        }
    }

    /// Records a check that could not be computed at all.
    pub fn failed(&mut self, name: impl Into<String>, why: &str) {
        let name = name.into();
        self.fact(&name, format!("not computed: {why}"));
        self.check(name, f64::INFINITY, 0.0);
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn set_timing(&mut self, elapsed: Duration) {
        self.timing_ms = Some(elapsed.as_secs_f64() * 1e3);
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.passed { "PASS" } else { "FAIL" });
        for (k, v) in &self.facts {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        for v in &self.values {
            out.push_str(&format!("  {} = {}\n", v.name, sci(v.value)));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            out.push_str(&format!(
                "  {} {:<width$}  residual {:>9}  tol {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                sci(c.residual),
                sci(c.tol),
            ));
        }
        if !self.passed {
            out.push_str(&format!("  failed: {}\n", self.failures().join(", ")));
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::new(1, e.to_string()))?;
        s.push('\n');
        std::fs::write(path, s).map_err(|e| CliError::io(path, e))
    }
}
