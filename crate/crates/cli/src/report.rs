//! Check records and the JSON report.

use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One pass/fail line. The verdict is always `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Key into the anchor table in `docs/anchors.md`, or `plumbing`.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: &str, residual: f64, tolerance: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            verdict: Verdict::Fail,
            detail: None,
        };
        c.decide();
        c
    }

    /// Check of an exact property: residual is the number of violations and the
    /// tolerance is zero.
    pub fn count(name: impl Into<String>, anchor: &str, violations: usize) -> Self {
        Self::new(name, anchor, violations as f64, 0.0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// NaN residuals fail.
    fn decide(&mut self) {
        self.verdict = if self.residual <= self.tolerance { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn set_tolerance(&mut self, tol: f64) {
        self.tolerance = tol;
        self.decide();
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Named claim that cannot be checked at desk scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOfScope {
    pub anchor: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub tool: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub environment: Environment,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
    /// Raw series and diagnostic payloads keyed by group.
    pub data: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub out_of_scope: Vec<OutOfScope>,
    /// Present only when timing was requested, so that default reports are
    /// byte-for-byte reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Report {
    pub fn new(
        scenario: Scenario,
        mut checks: Vec<CheckRecord>,
        data: serde_json::Map<String, serde_json::Value>,
        out_of_scope: Vec<OutOfScope>,
    ) -> Self {
        if let Some(tol) = scenario.tolerance {
            for c in &mut checks {
                c.set_tolerance(tol);
            }
        }
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.passed()).count();
        let environment = Environment {
            tool: "stdsub".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: scenario.seed,
        };
        Self {
            scenario,
            environment,
            summary: Summary { total: checks.len(), passed, failed: checks.len() - passed },
            checks,
            data,
            out_of_scope,
            wall_time_seconds: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table of every check, one line each.
    pub fn summary_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let awidth = self.checks.iter().map(|c| c.anchor.len()).max().unwrap_or(6).max(6);
        let mut out = format!(
            "{:<width$}  {:<awidth$}  {:>12}  {:>12}  verdict\n",
            "check", "anchor", "residual", "tolerance"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<width$}  {:<awidth$}  {:>12.3e}  {:>12.3e}  {}\n",
                c.name,
                c.anchor,
                c.residual,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "{} checks, {} passed, {} failed\n",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        out
    }
}

/// Output of one check group.
#[derive(Debug, Clone, Default)]
pub struct GroupOutput {
    pub checks: Vec<CheckRecord>,
    pub data: serde_json::Map<String, serde_json::Value>,
}

impl GroupOutput {
    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn data(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).expect("data serializes"));
    }
}
