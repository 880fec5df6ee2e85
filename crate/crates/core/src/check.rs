//! Uniform record for inequality checks, shared by every module that
//! verifies a bound.

use serde::Serialize;

use crate::exact::{margin, Q};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable identifier of the statement being checked.
    pub anchor: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
    /// `lhs / rhs` for lower bounds, `rhs / lhs` for upper bounds; at least
    /// 1 exactly when the check holds.
    pub margin: f64,
    /// Hard assertions fail a run; diagnostics are reported only.
    pub asserted: bool,
}

impl CheckRecord {
    /// Records `lhs >= rhs` (or `lhs > rhs` when `strict`).
    pub fn at_least(name: &str, anchor: &str, lhs: &Q, rhs: &Q, strict: bool) -> CheckRecord {
        let holds = if strict { lhs > rhs } else { lhs >= rhs };
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            holds,
            margin: margin(lhs, rhs),
            asserted: true,
        }
    }

    /// Records `lhs <= rhs` (or `lhs < rhs` when `strict`).
    pub fn at_most(name: &str, anchor: &str, lhs: &Q, rhs: &Q, strict: bool) -> CheckRecord {
        let holds = if strict { lhs < rhs } else { lhs <= rhs };
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            holds,
            margin: margin(rhs, lhs),
            asserted: true,
        }
    }

    /// Floating-point upper bound with a relative tolerance.
    pub fn at_most_f64(name: &str, anchor: &str, lhs: f64, rhs: f64, rel_tol: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: format!("{lhs:.12}"),
            rhs: format!("{rhs:.12}"),
            holds: lhs <= rhs * (1.0 + rel_tol),
            margin: if lhs == 0.0 { f64::INFINITY } else { rhs / lhs },
            asserted: true,
        }
    }

    /// Floating-point lower bound with a relative tolerance.
    pub fn at_least_f64(name: &str, anchor: &str, lhs: f64, rhs: f64, rel_tol: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: format!("{lhs:.12}"),
            rhs: format!("{rhs:.12}"),
            holds: lhs >= rhs * (1.0 - rel_tol),
            margin: if rhs == 0.0 { f64::INFINITY } else { lhs / rhs },
            asserted: true,
        }
    }

    pub fn boolean(name: &str, anchor: &str, holds: bool, detail: &str) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: detail.to_string(),
            rhs: String::new(),
            holds,
            margin: if holds { 1.0 } else { 0.0 },
            asserted: true,
        }
    }

    pub fn diagnostic(mut self) -> CheckRecord {
        self.asserted = false;
        self
    }

    /// True when the record is asserted and fails.
    pub fn is_failure(&self) -> bool {
        self.asserted && !self.holds
    }
}
