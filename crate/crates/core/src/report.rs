//! Verification reports with stable JSON output.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

/// Rounds to 15 significant digits so that output is stable across
/// platforms whose last-bit rounding differs.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub(crate) fn ser_sig15<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round_sig15(*x))
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser_sig15")]
    pub residual: f64,
    #[serde(serialize_with = "ser_sig15")]
    pub tolerance: f64,
    pub pass: bool,
    /// Whether a global tolerance override applies (false for counts and ratios).
    #[serde(skip)]
    pub overridable: bool,
}

impl Check {
    /// Passes when `residual <= tolerance`; NaN never passes.
    pub fn residual(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            overridable: true,
        }
    }

    /// A check whose tolerance is structural (a count or ratio bound).
    pub fn fixed(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            overridable: false,
            ..Self::residual(name, residual, tolerance)
        }
    }

    /// Number of disagreements; passes only when zero.
    pub fn count(name: impl Into<String>, mismatches: usize) -> Self {
        Self::fixed(name, mismatches as f64, 0.0)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.residual <= tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub m: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl Report {
    pub fn new(suite: impl Into<String>, m: usize, seed: u64, checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.into(),
            m,
            seed,
            checks,
            overall,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}  m = {}  seed = {}",
            self.suite, self.m, self.seed
        );
        let _ = writeln!(
            out,
            "{:<6}{:<width$}  {:>12}  {:>9}",
            "", "check", "residual", "tol"
        );
        for c in &self.checks {
            let flag = if c.pass { "ok" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{flag:<6}{:<width$}  {:>12.3e}  {:>9.1e}",
                c.name, c.residual, c.tolerance
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.overall { "pass" } else { "FAIL" }
        );
        out
    }
}
