//! Uniform pass/fail record for every numerical identity check.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::params::PtParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<PtParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Complex64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// `pass` is `residual <= tolerance`; a NaN residual fails.
    pub fn new(identity: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            identity: identity.into(),
            strategy: None,
            params: None,
            n: None,
            inputs: BTreeMap::new(),
            lhs: None,
            rhs: None,
            residual,
            tolerance,
            pass: residual <= tolerance,
            notes: Vec::new(),
        }
    }

    /// Report for `|lhs - rhs|`.
    pub fn compare(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        Self::new(identity, (lhs - rhs).norm(), tolerance).with_sides(lhs, rhs)
    }

    pub fn with_sides(mut self, lhs: Complex64, rhs: Complex64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }

    pub fn with_strategy(mut self, strategy: impl Into<String>) -> Self {
        self.strategy = Some(strategy.into());
        self
    }

    pub fn with_params(mut self, params: PtParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Mark as failed regardless of the residual, with a reason.
    pub fn fail(mut self, reason: impl Into<String>) -> Self {
        self.pass = false;
        self.notes.push(reason.into());
        self
    }
}
