//! Validation reports and invariant summaries.

use serde::Serialize;

/// One localized validation failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub location: String,
    pub reason: String,
}

/// Outcome of a validator: a decision, not an error.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            pass: true,
            failures: Vec::new(),
        }
    }

    pub fn fail(&mut self, location: impl Into<String>, reason: impl Into<String>) {
        self.pass = false;
        self.failures.push(Failure {
            location: location.into(),
            reason: reason.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.pass &= other.pass;
        self.failures.extend(other.failures);
    }

    pub fn failed_at(&self, location: &str) -> bool {
        self.failures.iter().any(|f| f.location == location)
    }
}
