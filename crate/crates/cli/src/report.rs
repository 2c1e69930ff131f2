//! Check records and the versioned JSON report.

use serde::Serialize;

use crate::config::{RunConfig, Suite};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A check expected to fail did fail; counts as a pass.
    XfailConfirmed,
    /// A check expected to fail passed; counts as a failure until the
    /// expectation is revisited.
    XfailNotObserved,
}

impl Status {
    pub fn ok(self) -> bool {
        matches!(self, Status::Pass | Status::XfailConfirmed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Exclusions {
    pub count: usize,
    pub rule: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    /// What is being checked, in mathematical terms.
    pub anchor: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: f64,
    pub status: Status,
    pub samples: usize,
    pub exclusions: Exclusions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

/// Running maximum and mean of non-negative residuals.
#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub max: f64,
    pub sum: f64,
    pub n: usize,
    pub excluded: usize,
}

impl Stats {
    pub fn push(&mut self, r: f64) {
        let r = r.abs();
        self.max = if r.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(r) };
        self.sum += r;
        self.n += 1;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }
}

/// Builder for one [`Check`].
pub struct CheckSpec {
    pub id: String,
    pub anchor: String,
    pub tol: f64,
    pub expect_fail: bool,
    pub rule: String,
}

impl CheckSpec {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, tol: f64) -> Self {
        Self { id: id.into(), anchor: anchor.into(), tol, expect_fail: false, rule: "none".into() }
    }

    pub fn expect_fail(mut self, yes: bool) -> Self {
        self.expect_fail = yes;
        self
    }

    pub fn rule(mut self, rule: impl Into<String>) -> Self {
        self.rule = rule.into();
        self
    }

    /// Grades measured statistics. An error or an empty sample never counts
    /// as a pass, nor as a confirmed expected failure.
    pub fn finish(self, stats: &Stats, error: Option<String>) -> Check {
        let within = error.is_none() && stats.n > 0 && stats.max <= self.tol;
        let status = match (self.expect_fail, within) {
            (false, true) => Status::Pass,
            (false, false) => Status::Fail,
            (true, true) => Status::XfailNotObserved,
            (true, false) if error.is_none() && stats.n > 0 && !stats.max.is_nan() => Status::XfailConfirmed,
            (true, false) => Status::Fail,
        };
        Check {
            id: self.id,
            anchor: self.anchor,
            max_residual: stats.max,
            mean_residual: stats.mean(),
            tol: self.tol,
            status,
            samples: stats.n,
            exclusions: Exclusions { count: stats.excluded, rule: self.rule },
            error,
            detail: None,
        }
    }

    /// Runs `f`, which fills `stats`, and grades the result.
    pub fn run<F>(self, f: F) -> Check
    where
        F: FnOnce(&mut Stats) -> Result<(), String>,
    {
        let mut stats = Stats::default();
        let err = f(&mut stats).err();
        self.finish(&stats, err)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub xfail_confirmed: usize,
    pub xfail_not_observed: usize,
}

impl Summary {
    pub fn of(checks: &[Check]) -> Self {
        let mut s = Summary { total: checks.len(), ..Default::default() };
        for c in checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::XfailConfirmed => s.xfail_confirmed += 1,
                Status::XfailNotObserved => s.xfail_not_observed += 1,
            }
        }
        s
    }

    pub fn add(&mut self, o: &Summary) {
        self.total += o.total;
        self.pass += o.pass;
        self.fail += o.fail;
        self.xfail_confirmed += o.xfail_confirmed;
        self.xfail_not_observed += o.xfail_not_observed;
    }

    pub fn all_ok(&self) -> bool {
        self.fail == 0 && self.xfail_not_observed == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Self { suite, summary: Summary::of(&checks), checks }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch, or 0 under a fixed clock.
    pub generated_unix: u64,
    pub config: RunConfig,
    pub summary: Summary,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(config: RunConfig, suites: Vec<SuiteReport>) -> Self {
        let generated_unix = if config.fixed_clock {
            0
        } else {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
        };
        let mut summary = Summary::default();
        for s in &suites {
            summary.add(&s.summary);
        }
        Self { schema: SCHEMA, tool: "susyflow", version: env!("CARGO_PKG_VERSION"), generated_unix, config, summary, suites }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.checks.iter())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(vals: &[f64]) -> Stats {
        let mut s = Stats::default();
        vals.iter().for_each(|&v| s.push(v));
        s
    }

    #[test]
    fn grading() {
        let small = stats(&[1e-9, 3e-9]);
        let big = stats(&[1e-9, 0.5]);
        assert_eq!(CheckSpec::new("a", "", 1e-6).finish(&small, None).status, Status::Pass);
        assert_eq!(CheckSpec::new("a", "", 1e-6).finish(&big, None).status, Status::Fail);
        assert_eq!(CheckSpec::new("a", "", 1e-6).expect_fail(true).finish(&big, None).status, Status::XfailConfirmed);
        assert_eq!(CheckSpec::new("a", "", 1e-6).expect_fail(true).finish(&small, None).status, Status::XfailNotObserved);
        let err = CheckSpec::new("a", "", 1e-6).expect_fail(true).finish(&big, Some("boom".into()));
        assert_eq!(err.status, Status::Fail);
        assert_eq!(CheckSpec::new("a", "", 1e-6).finish(&Stats::default(), None).status, Status::Fail);
        assert!((small.mean() - 2e-9).abs() < 1e-24);
    }

    #[test]
    fn nan_poisons_the_maximum() {
        let s = stats(&[1e-9, f64::NAN, 1e-12]);
        assert!(s.max.is_nan());
        assert_eq!(CheckSpec::new("a", "", 1e-6).finish(&s, None).status, Status::Fail);
    }
}
