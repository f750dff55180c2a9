//! Verification suites behind the `verify` command.
//!
//! Each suite compares two independently computed artifacts and reports
//! counterexamples instead of stopping at the first one. Runs are
//! deterministic for a given seed; only `wall_ms` varies between runs.

mod exact;
mod numeric;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::Error;
use crate::rational::{self, Rational};
use crate::solver::Sig17;

pub use exact::{
    verify_beta_properties, verify_catalog, verify_induction, verify_recurrence_vs_explicit,
    verify_recurrence_with, AlphaFn,
};
pub use numeric::{
    verify_equivalence_numeric, verify_limit, verify_solver_anchors, verify_stability_dichotomy,
    EquivalenceCase, LimitCase, StabilityDraw,
};

pub const DEFAULT_SEED: u64 = 42;

/// A failed case with its counterexample payload.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub case: String,
    pub detail: BTreeMap<String, Box<RawValue>>,
}

impl Failure {
    pub fn new(case: impl Into<String>) -> Self {
        Failure {
            case: case.into(),
            detail: BTreeMap::new(),
        }
    }

    fn put<T: Serialize + ?Sized>(mut self, key: &str, value: &T) -> Self {
        let raw = serde_json::value::to_raw_value(value).expect("serializable detail");
        self.detail.insert(key.to_string(), raw);
        self
    }

    pub fn num(self, key: &str, x: f64) -> Self {
        self.put(key, &Sig17(x))
    }

    pub fn nums(self, key: &str, xs: &[f64]) -> Self {
        let v: Vec<Sig17> = xs.iter().copied().map(Sig17).collect();
        self.put(key, &v)
    }

    pub fn rat(self, key: &str, r: &Rational) -> Self {
        self.put(key, &rational::format(r))
    }

    pub fn rats(self, key: &str, rs: &[Rational]) -> Self {
        let v: Vec<String> = rs.iter().map(rational::format).collect();
        self.put(key, &v)
    }

    pub fn text(self, key: &str, s: impl fmt::Display) -> Self {
        self.put(key, &s.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub seed: u64,
    pub wall_ms: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteReport>,
}

impl SuiteReport {
    /// Empty report; `passed` is kept consistent by [`SuiteReport::finish`].
    pub fn new(suite: &str, seed: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            cases: 0,
            failures: Vec::new(),
            seed,
            wall_ms: 0,
            passed: true,
            notes: Vec::new(),
            suites: Vec::new(),
        }
    }

    /// Records one case; `None` means it passed.
    pub fn record(&mut self, outcome: Option<Failure>) {
        self.cases += 1;
        self.failures.extend(outcome);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_ms = started.elapsed().as_millis() as u64;
        self.passed = self.failures.is_empty() && self.suites.iter().all(|s| s.passed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Recurrence,
    Induction,
    Beta,
    Stability,
    Equivalence,
    Limit,
    Anchors,
    Catalog,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Recurrence,
        Suite::Induction,
        Suite::Beta,
        Suite::Stability,
        Suite::Equivalence,
        Suite::Limit,
        Suite::Anchors,
        Suite::Catalog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Recurrence => "recurrence",
            Suite::Induction => "induction",
            Suite::Beta => "beta",
            Suite::Stability => "stability",
            Suite::Equivalence => "equivalence",
            Suite::Limit => "limit",
            Suite::Anchors => "anchors",
            Suite::Catalog => "catalog",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown suite {s:?} (known: recurrence, induction, beta, stability, equivalence, limit, anchors, catalog, all)"
                ))
            })
    }
}

/// Runs one suite with its standard parameters.
pub fn run(suite: Suite, seed: u64) -> SuiteReport {
    match suite {
        Suite::Recurrence => verify_recurrence_vs_explicit(8, 100, seed),
        Suite::Induction => verify_induction(6, 50, seed),
        Suite::Beta => verify_beta_properties(6, 3, seed),
        Suite::Stability => verify_stability_dichotomy(200, seed),
        Suite::Equivalence => verify_equivalence_numeric(&[0, 1, 2], 1e-6, seed),
        Suite::Limit => verify_limit(&[0, 1], seed),
        Suite::Anchors => verify_solver_anchors(seed),
        Suite::Catalog => verify_catalog(seed),
        Suite::All => {
            let started = Instant::now();
            let mut report = SuiteReport::new("all", seed);
            report.suites = Suite::EACH.iter().map(|s| run(*s, seed)).collect();
            report.cases = report.suites.iter().map(|s| s.cases).sum();
            for s in &report.suites {
                for f in &s.failures {
                    report.failures.push(Failure {
                        case: format!("{}: {}", s.suite, f.case),
                        detail: f.detail.clone(),
                    });
                }
            }
            report.finish(started)
        }
    }
}
