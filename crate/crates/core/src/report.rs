//! Structured verdicts for inequality checks.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A hypothesis of the inequality does not hold for this input.
    NotApplicable,
    /// Computed for information only; the comparison is not a valid test of the inequality.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

/// One evaluated inequality `lhs >= rhs` (orientation normalized so that
/// `margin = lhs - rhs >= 0` means it holds).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub hypotheses: Vec<Hypothesis>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Absolute slack granted to floating-point rounding.
    pub tolerance: f64,
    pub verdict: Verdict,
    pub constants: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl BoundReport {
    /// Builds a report for `lhs >= rhs`. The verdict is `NotApplicable` when any
    /// hypothesis fails, otherwise pass iff `lhs - rhs >= -tolerance`.
    pub fn new(name: impl Into<String>, hypotheses: Vec<Hypothesis>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        let verdict = if hypotheses.iter().any(|h| !h.holds) {
            Verdict::NotApplicable
        } else if margin >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        BoundReport {
            name: name.into(),
            hypotheses,
            lhs,
            rhs,
            margin,
            tolerance,
            verdict,
            constants: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Report whose verdict was decided by exact arithmetic.
    pub fn exact(name: impl Into<String>, hypotheses: Vec<Hypothesis>, lhs: f64, rhs: f64, holds: bool) -> Self {
        let mut r = Self::new(name, hypotheses, lhs, rhs, 0.0);
        if r.verdict != Verdict::NotApplicable {
            r.verdict = if holds { Verdict::Pass } else { Verdict::Fail };
        }
        r
    }

    pub fn constant(mut self, name: &str, value: impl ToString) -> Self {
        self.constants.push((name.to_string(), value.to_string()));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn informational(mut self) -> Self {
        if self.verdict != Verdict::NotApplicable {
            self.verdict = Verdict::Informational;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn hyp(name: impl Into<String>, holds: bool) -> Hypothesis {
    Hypothesis { name: name.into(), holds }
}

/// Rounds a positive quantity up/down by a relative amount, for outward rounding.
pub fn up(x: f64) -> f64 {
    x + x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE
}

pub fn down(x: f64) -> f64 {
    x - x.abs() * 4.0 * f64::EPSILON - f64::MIN_POSITIVE
}
