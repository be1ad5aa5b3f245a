use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one numerical identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl CheckReport {
    /// A NaN residual never passes.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual.abs()
        };
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            metadata: BTreeMap::new(),
        }
    }

    /// Report for an identity that is expected to be violated: it passes when
    /// `observed` reaches at least `floor`. The residual is the shortfall, so
    /// `passed ⇔ residual ≤ tolerance` still holds with tolerance zero.
    pub fn expect_violation(name: impl Into<String>, observed: f64, floor: f64) -> Self {
        let shortfall = if observed.is_nan() {
            f64::INFINITY
        } else {
            (floor - observed).max(0.0)
        };
        Self::new(name, shortfall, 0.0)
            .with("observed", format!("{observed:e}"))
            .with("floor", format!("{floor:e}"))
            .with("expect", "nonzero")
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn with_all<I, K, V>(mut self, items: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        for (k, v) in items {
            self.metadata.insert(k.into(), v.into());
        }
        self
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

pub fn max_residual(reports: &[CheckReport]) -> f64 {
    reports.iter().map(|r| r.residual).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_residual() {
        assert!(CheckReport::new("a", 1e-12, 1e-9).passed);
        assert!(!CheckReport::new("a", 1e-3, 1e-9).passed);
        assert!(!CheckReport::new("a", f64::NAN, 1e-9).passed);
    }

    #[test]
    fn violation_reports_shortfall() {
        let hit = CheckReport::expect_violation("neg", 0.5, 1e-4);
        assert!(hit.passed);
        assert_eq!(hit.residual, 0.0);
        let miss = CheckReport::expect_violation("neg", 1e-8, 1e-4);
        assert!(!miss.passed);
        assert!(miss.residual > 0.0);
        assert_eq!(miss.metadata["expect"], "nonzero");
    }

    #[test]
    fn serde_round_trip() {
        let r = CheckReport::new("x", 0.25, 1.0).with("set", "[1]");
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<CheckReport>(&s).unwrap(), r);
    }
}
