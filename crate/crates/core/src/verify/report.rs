use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// How a measured value is compared against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Relation {
    pub fn holds(self, measured: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => measured <= tolerance,
            Relation::AtLeast => measured >= tolerance,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        })
    }
}

/// One pass/fail line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// `None` when the check could not run; see `error`.
    pub measured: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    /// Supporting numbers: per-draw values, tables, estimates.
    pub details: BTreeMap<String, serde_json::Value>,
    pub error: Option<String>,
}

impl CheckResult {
    pub fn new(name: &str, measured: f64, relation: Relation, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: measured.is_finite() && relation.holds(measured, tolerance),
            measured: measured.is_finite().then_some(measured),
            relation,
            tolerance,
            details: BTreeMap::new(),
            error: None,
        }
    }

    pub fn failed(name: &str, relation: Relation, tolerance: f64, error: String) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: None,
            relation,
            tolerance,
            details: BTreeMap::new(),
            error: Some(error),
        }
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
        self
    }

    /// Extra condition folded into `passed`.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.passed &= ok;
        self.details.insert(key.to_string(), serde_json::Value::Bool(ok));
        self
    }

    pub fn summary_line(&self) -> String {
        let measured = self
            .measured
            .map_or_else(|| "n/a".to_string(), |m| format!("{m:.6e}"));
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{status} {}: {e}", self.name),
            None => format!(
                "{status} {}: {measured} {} {:.3e}",
                self.name, self.relation, self.tolerance
            ),
        }
    }
}

/// Everything `run_suite` measured. Contains no timestamps or host data, so a
/// fixed seed yields an identical serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: String,
    pub seed: u64,
    pub code_version: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}
