//! Structured pass/fail results with residuals and effective tolerances.

use serde::{Deserialize, Serialize};

/// One verified property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The mathematical claim the check exercises.
    pub property: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: String,
}

impl CheckResult {
    pub fn new(
        name: &str,
        property: &str,
        residual: f64,
        tolerance: f64,
        details: String,
    ) -> Self {
        Self {
            name: name.into(),
            property: property.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            details,
        }
    }

    /// A check that could not be evaluated counts as failed.
    pub fn errored(name: &str, property: &str, tolerance: f64, error: String) -> Self {
        Self {
            name: name.into(),
            property: property.into(),
            residual: f64::MAX,
            tolerance,
            pass: false,
            details: format!("check failed to evaluate: {error}"),
        }
    }
}

/// Full suite outcome for one system. Serialization is deterministic: checks
/// are sorted by name and all fields have a fixed order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub system: String,
    pub seed: u64,
    pub stepper: String,
    pub dt: f64,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl VerificationReport {
    pub fn assemble(
        system: &str,
        seed: u64,
        stepper: String,
        dt: f64,
        config: serde_json::Value,
        mut checks: Vec<CheckResult>,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let all_passed = checks.iter().all(|c| c.pass);
        Self {
            system: system.into(),
            seed,
            stepper,
            dt,
            config,
            checks,
            all_passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
