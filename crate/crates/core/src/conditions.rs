//! Pass/fail bookkeeping shared by every verification routine.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalars::{FloatComplex, Scalar};

/// Outcome of a single named identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    /// Written as `null` in JSON when infinite.
    #[serde(deserialize_with = "residual_or_null")]
    pub max_residual: f64,
    /// First failing index tuple or word. A passing check is empty unless it
    /// asserts that something breaks, in which case this names the counterexample.
    pub witness: String,
}

fn residual_or_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Check {
    pub fn passed() -> Self {
        Self { pass: true, max_residual: 0.0, witness: String::new() }
    }

    pub fn failed(witness: impl Into<String>) -> Self {
        Self { pass: false, max_residual: f64::INFINITY, witness: witness.into() }
    }

    /// A passing check that carries the counterexample it relied on.
    pub fn passed_with(witness: impl Into<String>) -> Self {
        Self { pass: true, max_residual: 0.0, witness: witness.into() }
    }

    pub fn from_bool(ok: bool, witness: impl Into<String>) -> Self {
        if ok {
            Self::passed()
        } else {
            Self { pass: false, max_residual: 1.0, witness: witness.into() }
        }
    }
}

/// Streams residuals of one identity and decides pass/fail.
///
/// Exact scalars pass only when every residual is zero; float scalars pass
/// when the largest residual is within [`FloatComplex::tolerance`].
pub struct Residuals<S> {
    max: f64,
    any_nonzero: bool,
    witness: Option<String>,
    _s: std::marker::PhantomData<S>,
}

impl<S: Scalar> Default for Residuals<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Residuals<S> {
    pub fn new() -> Self {
        Self { max: 0.0, any_nonzero: false, witness: None, _s: std::marker::PhantomData }
    }

    pub fn observe(&mut self, r: &S, witness: impl FnOnce() -> String) {
        if r.is_zero() {
            return;
        }
        let m = r.magnitude();
        let bad = S::EXACT || m > FloatComplex::tolerance();
        if bad && !self.any_nonzero {
            self.witness = Some(witness());
        }
        self.any_nonzero |= bad;
        if m > self.max {
            self.max = m;
        }
    }

    /// Records a residual that is only known through its magnitude.
    pub fn observe_fail(&mut self, magnitude: f64, witness: impl FnOnce() -> String) {
        if !self.any_nonzero {
            self.witness = Some(witness());
        }
        self.any_nonzero = true;
        self.max = self.max.max(magnitude);
    }

    pub fn finish(self) -> Check {
        Check {
            pass: !self.any_nonzero,
            max_residual: self.max,
            witness: self.witness.unwrap_or_default(),
        }
    }
}

/// Named collection of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConditionReport {
    pub checks: BTreeMap<String, Check>,
}

impl ConditionReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, check: Check) {
        self.checks.insert(name.into(), check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.get(name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.pass)
    }

    /// Merges another report, prefixing its check names.
    pub fn extend_prefixed(&mut self, prefix: &str, other: ConditionReport) {
        for (k, v) in other.checks {
            self.checks.insert(format!("{prefix}.{k}"), v);
        }
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.pass).map(|(k, _)| k.as_str()).collect()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, c) in &self.checks {
            let verdict = if c.pass { "pass" } else { "FAIL" };
            write!(f, "{verdict:4}  {name}  residual={:e}", c.max_residual)?;
            if !c.witness.is_empty() {
                write!(f, "  witness={}", c.witness)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
