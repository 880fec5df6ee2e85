use std::collections::BTreeMap;
use std::fmt::Write;

use addstruct::check::CheckRecord;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "addstruct-report/1";

/// Machine-readable result of one command or config run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    /// Echo of the effective configuration.
    pub config: Value,
    /// Every check made, asserted or diagnostic.
    pub checks: Vec<CheckRecord>,
    /// Command-specific payload keyed by section or experiment name.
    pub results: BTreeMap<String, Value>,
    /// Wall-clock seconds per section; excluded from [`RunReport::body`].
    pub timings: BTreeMap<String, f64>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, config: Value) -> RunReport {
        RunReport {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            checks: Vec::new(),
            results: BTreeMap::new(),
            timings: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn add_checks(&mut self, checks: impl IntoIterator<Item = CheckRecord>) {
        for c in checks {
            if c.is_failure() {
                self.passed = false;
            }
            self.checks.push(c);
        }
    }

    pub fn add_result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report payloads serialize");
        self.results.insert(key.to_string(), v);
    }

    /// Folds another report in under `prefix`.
    pub fn merge(&mut self, prefix: &str, other: RunReport) {
        self.passed &= other.passed;
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.results {
            self.results.insert(format!("{prefix}/{k}"), v);
        }
        for (k, t) in other.timings {
            self.timings.insert(format!("{prefix}/{k}"), t);
        }
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.is_failure()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without timings, for determinism comparisons.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("timings");
        }
        v
    }

    pub fn summary(&self) -> String {
        let asserted = self.checks.iter().filter(|c| c.asserted).count();
        let failed = self.failures();
        let mut out = String::new();
        writeln!(out, "{} ({})", self.command, if self.passed { "ok" } else { "FAILED" }).unwrap();
        writeln!(
            out,
            "  {asserted} asserted checks, {} failed, {} diagnostics",
            failed.len(),
            self.checks.len() - asserted
        )
        .unwrap();
        for c in failed.iter().take(20) {
            if c.rhs.is_empty() {
                writeln!(out, "  FAIL {} [{}]: {}", c.name, c.anchor, c.lhs).unwrap();
            } else {
                writeln!(out, "  FAIL {} [{}]: {} vs {}", c.name, c.anchor, c.lhs, c.rhs).unwrap();
            }
        }
        if failed.len() > 20 {
            writeln!(out, "  ... {} more failures", failed.len() - 20).unwrap();
        }
        let total: f64 = self.timings.values().sum();
        writeln!(out, "  {:.3}s in {} sections", total, self.timings.len()).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use addstruct::exact::qi;

    #[test]
    fn failures_flip_the_verdict() {
        let mut r = RunReport::new("t", Value::Null);
        r.add_checks([CheckRecord::at_least("a", "x", &qi(2), &qi(1), false)]);
        assert!(r.passed);
        r.add_checks([CheckRecord::at_least("b", "y", &qi(0), &qi(1), false).diagnostic()]);
        assert!(r.passed);
        r.add_checks([CheckRecord::at_least("c", "z", &qi(0), &qi(1), false)]);
        assert!(!r.passed);
        assert_eq!(r.failures().len(), 1);
        assert!(r.summary().contains("FAIL c [z]"));
    }

    #[test]
    fn body_drops_timings() {
        let mut r = RunReport::new("t", Value::Null);
        r.timings.insert("x".into(), 1.0);
        assert!(r.body().get("timings").is_none());
        assert!(r.body().get("schema").is_some());
    }
}
