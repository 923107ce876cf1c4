//! Machine-readable pass/fail reports. Reports hold no timings, so equal
//! configurations serialize to byte-identical JSON.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value < tolerance`.
    Below,
    /// `value > tolerance`.
    Above,
    /// `|value − target| <= tolerance`.
    Within,
    /// Boolean property; `value` is 1 or 0.
    Holds,
    /// The computation itself failed.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub relation: Relation,
    pub value: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: value < tolerance,
            relation: Relation::Below,
            value,
            tolerance,
            target: None,
            params: Map::new(),
            error: None,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            passed: value > bound,
            relation: Relation::Above,
            ..Check::below(name, value, bound)
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            passed: (value - target).abs() <= tolerance,
            relation: Relation::Within,
            target: Some(target),
            ..Check::below(name, value, tolerance)
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            passed: ok,
            relation: Relation::Holds,
            ..Check::below(name, if ok { 1.0 } else { 0.0 }, 0.0)
        }
    }

    pub fn error(name: impl Into<String>, err: impl ToString) -> Self {
        Check {
            passed: false,
            relation: Relation::Error,
            error: Some(err.to_string()),
            ..Check::below(name, f64::NAN, 0.0)
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match self.relation {
            Relation::Below => format!("{:e} < {:e}", self.value, self.tolerance),
            Relation::Above => format!("{:e} > {:e}", self.value, self.tolerance),
            Relation::Within => format!(
                "|{} - {}| <= {:e}",
                self.value,
                self.target.unwrap_or(f64::NAN),
                self.tolerance
            ),
            Relation::Holds => String::new(),
            Relation::Error => self.error.clone().unwrap_or_default(),
        };
        let params = if self.params.is_empty() {
            String::new()
        } else {
            format!(" {}", Value::Object(self.params.clone()))
        };
        format!("{verdict} {} {detail}{params}", self.name).replace("  ", " ").trim_end().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub params: Map<String, Value>,
    pub checks: Vec<Check>,
    /// Tables behind the checks.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl SuiteReport {
    pub fn new(id: &str, title: &str, params: Map<String, Value>) -> Self {
        SuiteReport {
            id: id.into(),
            title: title.into(),
            passed: true,
            params,
            checks: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        checks.into_iter().for_each(|c| self.push(c));
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub config: crate::config::RunConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl BatteryReport {
    pub fn suite(&self, id: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::below("x", f64::NAN, 1.0).passed);
        assert!(!Check::within("x", f64::NAN, 0.0, 1.0).passed);
    }

    #[test]
    fn suite_tracks_failures() {
        let mut s = SuiteReport::new("X", "x", Map::new());
        s.push(Check::below("ok", 0.5, 1.0));
        assert!(s.passed);
        s.push(Check::below("bad", 2.0, 1.0).with("t", 0.1));
        assert!(!s.passed);
        let bad: Vec<_> = s.failures().collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].line().starts_with("FAIL bad 2e0 < 1e0"));
    }

    #[test]
    fn failing_check_serializes_residual_tolerance_and_params() {
        let c = Check::below("gap", 2.0, 1.0).with("dt", 1e-3);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["value"], 2.0);
        assert_eq!(v["tolerance"], 1.0);
        assert_eq!(v["params"]["dt"], 1e-3);
    }
}
