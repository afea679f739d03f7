use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checks::Class;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub identity: String,
    pub class: Class,
    /// `None` when the check errored or produced a non-finite residual.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Present only when timings were requested, so default reports stay
    /// byte-identical across runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub points: usize,
    /// Sorted by name.
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: String, seed: u64, points: usize, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.passed).count();
        let summary = Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
        };
        Self {
            scenario,
            seed,
            points,
            checks,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        if self.checks.is_empty() {
            return "0 checks\n".to_string();
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {}, {} points)", self.scenario, self.seed, self.points);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let residual = match c.residual {
                Some(r) => format!("{r:.3e}"),
                None => "-".to_string(),
            };
            let tolerance = if c.class == Class::Exact {
                "exact".to_string()
            } else {
                format!("tol {:.0e}", c.tolerance)
            };
            let _ = write!(out, "{status}  {:width$}  {residual:>10}  {tolerance}", c.name);
            if let Some(ms) = c.wall_ms {
                let _ = write!(out, "  {ms:.1} ms");
            }
            if !c.passed {
                let _ = write!(out, "  [{}]", c.identity);
                if let Some(e) = &c.error {
                    let _ = write!(out, "  error: {e}");
                }
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks: {} passed, {} failed", s.total, s.passed, s.failed);
        out
    }
}
