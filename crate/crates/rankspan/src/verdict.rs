//! Outcome of a theorem check: a status plus a witness payload that is either
//! a certificate, a counterexample, or aggregate statistics. The same shape is
//! used for single checks and for whole verification suites; suites add trial
//! metadata (seed, counts, elapsed time).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    ExceptionRegime,
    HypothesisNotMet,
    BudgetExceeded,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Vacuous => "VACUOUS",
            Status::ExceptionRegime => "EXCEPTION_REGIME",
            Status::HypothesisNotMet => "HYPOTHESIS_NOT_MET",
            Status::BudgetExceeded => "BUDGET_EXCEEDED",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub suite: String,
    pub status: Status,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
    pub witness: serde_json::Value,
    pub elapsed_ms: u64,
}

impl Verdict {
    pub fn new(suite: &str, status: Status) -> Self {
        Verdict {
            suite: suite.to_string(),
            status,
            params: BTreeMap::new(),
            seed: 0,
            counts: BTreeMap::new(),
            witness: serde_json::Value::Null,
            elapsed_ms: 0,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, key: &str, value: u64) -> Self {
        self.counts.insert(key.to_string(), value);
        self
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Full JSON, including wall-clock elapsed_ms.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }

    /// JSON with elapsed_ms zeroed: the deterministic payload. Two runs of the
    /// same suite with the same seed produce byte-identical canonical JSON
    /// regardless of worker count.
    pub fn to_canonical_json(&self) -> String {
        let mut v = self.clone();
        v.elapsed_ms = 0;
        serde_json::to_string_pretty(&v).expect("verdict serializes")
    }

    /// Exit code contract: 0 for PASS/EXCEPTION_REGIME/VACUOUS/HYPOTHESIS_NOT_MET,
    /// 1 for FAIL (a counterexample was found), 2 for BUDGET_EXCEEDED.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Fail => 1,
            Status::BudgetExceeded => 2,
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_serializes_screaming() {
        assert_eq!(
            serde_json::to_string(&Status::ExceptionRegime).unwrap(),
            "\"EXCEPTION_REGIME\""
        );
        assert_eq!(
            serde_json::to_string(&Status::HypothesisNotMet).unwrap(),
            "\"HYPOTHESIS_NOT_MET\""
        );
    }

    #[test]
    fn canonical_json_ignores_elapsed() {
        let mut a = Verdict::new("t", Status::Pass).with_count("x", 3);
        let mut b = a.clone();
        a.elapsed_ms = 10;
        b.elapsed_ms = 99;
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_ne!(a.to_json(), b.to_json());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Verdict::new("t", Status::Pass).exit_code(), 0);
        assert_eq!(Verdict::new("t", Status::ExceptionRegime).exit_code(), 0);
        assert_eq!(Verdict::new("t", Status::Fail).exit_code(), 1);
        assert_eq!(Verdict::new("t", Status::BudgetExceeded).exit_code(), 2);
    }
}
