use serde::Serialize;
use serde_json::{json, Value};

use super::pairs::{PairSearch, PairSearcher};
use crate::automaton::{Dfa, State, WeakComponents, Word};

/// Evidence behind a decision. Each variant can be re-checked against the
/// automaton without trusting the code that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    ResetWord(Word),
    Disconnected(WeakComponents),
    DeadlockPair(State, State),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::ResetWord(_) => "reset_word",
            Certificate::Disconnected(_) => "disconnected",
            Certificate::DeadlockPair(..) => "deadlock_pair",
        }
    }
}

/// Which path of which decider produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Backward pair search with greedy reset-word extraction.
    Exact,
    /// Fast pipeline, weak-connectivity exit.
    FastConnectivity,
    /// Fast pipeline, candidate pair proven deadlock.
    FastCandidate,
    /// Fast pipeline, image collapse produced the certificate.
    FastCollapse,
    /// Fast pipeline gave up and ran the exact decider.
    Fallback,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Charged elementary operations.
    pub steps: u64,
    pub fallback: bool,
    /// Global allowance of the fast pipeline, if one applied.
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub synchronizing: bool,
    pub certificate: Certificate,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    /// Re-checks the certificate from scratch: reset words by image
    /// iteration, disconnection by arc closure of the labels, deadlock pairs
    /// by exhausting their forward closure in the pair automaton.
    pub fn verify(&self, d: &Dfa) -> bool {
        match &self.certificate {
            Certificate::ResetWord(w) => self.synchronizing && d.is_reset_word(w),
            Certificate::Disconnected(c) => !self.synchronizing && c.count >= 2 && c.is_consistent_with(d),
            Certificate::DeadlockPair(p, q) => {
                !self.synchronizing
                    && p != q
                    && *p < d.n()
                    && *q < d.n()
                    && PairSearcher::new().search(d, *p, *q, None).0 == PairSearch::Deadlock
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let certificate = match &self.certificate {
            Certificate::ResetWord(w) => json!(w),
            Certificate::Disconnected(c) => json!(c.labels),
            Certificate::DeadlockPair(p, q) => json!([p, q]),
        };
        let mut out = json!({
            "synchronizing": self.synchronizing,
            "certificate_type": self.certificate.kind(),
            "certificate": certificate,
            "method": self.method,
            "steps": self.diagnostics.steps,
        });
        if self.method != Method::Exact {
            out["fallback"] = json!(self.diagnostics.fallback);
            out["budget"] = json!(self.diagnostics.budget);
        }
        out
    }
}
