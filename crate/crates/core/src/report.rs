//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// passes when the worst slack is at least `-tolerance`
    Slack,
    /// passes when the worst defect is at most `tolerance` in magnitude
    Defect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub name: String,
    pub kind: CheckKind,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    pub worst_slack_or_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub findings: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details_path: Option<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, kind: CheckKind, tolerance: f64) -> Self {
        let worst = match kind {
            CheckKind::Slack => f64::INFINITY,
            CheckKind::Defect => 0.0,
        };
        VerificationReport {
            schema: REPORT_SCHEMA,
            name: name.into(),
            kind,
            params: BTreeMap::new(),
            samples: 0,
            worst_slack_or_defect: worst,
            tolerance,
            pass: true,
            findings: BTreeMap::new(),
            details_path: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.findings.insert(key.to_owned(), value.into());
    }

    /// Folds one sample into the running worst value.
    pub fn record(&mut self, value: f64) {
        self.samples += 1;
        self.worst_slack_or_defect = match self.kind {
            CheckKind::Slack => self.worst_slack_or_defect.min(value),
            CheckKind::Defect => {
                if value.abs() > self.worst_slack_or_defect.abs() || value.is_nan() {
                    value
                } else {
                    self.worst_slack_or_defect
                }
            }
        };
        self.pass = self.passes(self.worst_slack_or_defect);
    }

    pub fn passes(&self, value: f64) -> bool {
        match self.kind {
            CheckKind::Slack => value >= -self.tolerance,
            CheckKind::Defect => value.abs() <= self.tolerance,
        }
    }

    /// Merges another report of the same kind, keeping sample order irrelevant.
    pub fn absorb(&mut self, other: &VerificationReport) {
        debug_assert_eq!(self.kind, other.kind);
        let samples = self.samples + other.samples;
        if other.samples > 0 {
            self.record(other.worst_slack_or_defect);
        }
        self.samples = samples;
        self.pass = self.pass && other.pass;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
