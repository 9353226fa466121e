use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of one verification procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub sample_size: u64,
    #[serde(default)]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl TestReport {
    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64, passed: bool, sample_size: u64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            passed,
            sample_size,
            details: BTreeMap::new(),
        }
    }

    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64, sample_size: u64) -> Self {
        Self::new(name, statistic, threshold, statistic <= threshold, sample_size)
    }

    /// Passes when `statistic >= threshold`.
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64, sample_size: u64) -> Self {
        Self::new(name, statistic, threshold, statistic >= threshold, sample_size)
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.note(key, value);
        self
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
    }

    /// Combines several reports; passes iff all do. The statistic is the
    /// number of failing parts.
    pub fn all(name: impl Into<String>, parts: Vec<TestReport>) -> Self {
        let failing = parts.iter().filter(|p| !p.passed).count();
        let sample_size = parts.iter().map(|p| p.sample_size).max().unwrap_or(0);
        let mut report = Self::new(name, failing as f64, 0.0, failing == 0, sample_size);
        report.note("parts", &parts);
        report
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: statistic {:.6} vs threshold {:.6} (n = {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.threshold,
            self.sample_size
        )
    }
}
