//! Check records shared by all suites.

use serde::Serialize;

/// Witnesses kept per check; the failure count is always exact.
pub const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub location: String,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport { name: name.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn ok(&mut self) {
        self.checked += 1;
    }

    pub fn fail(&mut self, location: String, payload: serde_json::Value) {
        self.checked += 1;
        self.failed += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { location, payload });
        }
    }

    /// Records one check.
    pub fn check(&mut self, good: bool, location: impl FnOnce() -> (String, serde_json::Value)) {
        if good {
            self.ok();
        } else {
            let (l, p) = location();
            self.fail(l, p);
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    /// Folds per-item reports in input order, so output is deterministic.
    pub fn fold(name: &str, parts: impl IntoIterator<Item = CheckReport>) -> CheckReport {
        let mut acc = CheckReport::new(name);
        for p in parts {
            acc.merge(p);
        }
        acc
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: {} checked, {} failed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.failed
        )
    }
}

/// A named group of checks plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, config: serde_json::Value, checks: Vec<CheckReport>) -> Self {
        let passed = checks.iter().all(CheckReport::passed);
        SuiteReport { suite: suite.to_string(), config, checks, passed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_are_capped_counts_exact() {
        let mut r = CheckReport::new("x");
        for i in 0..20 {
            r.fail(format!("{i}"), serde_json::Value::Null);
        }
        r.ok();
        assert_eq!((r.checked, r.failed, r.witnesses.len()), (21, 20, MAX_WITNESSES));
        assert!(!r.passed());
        assert!(CheckReport::fold("y", vec![CheckReport::new("a")]).passed());
    }
}
