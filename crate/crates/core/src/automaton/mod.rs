//! Complete deterministic automata stored as a flat transition table.
//!
//! States are `0..n` and letters are `0..k`. The table is letter-major:
//! the successors of all states under one letter sit contiguously, which is
//! the access pattern of the per-letter functional-graph analysis.

mod components;
mod rng;

pub use components::{
    disconnected_singleton_probability, has_exactly_one_disconnected_state, is_weakly_connected,
    minimal_closed_components, ClosedComponents, UnionFind, WeakComponents,
};
pub use rng::{mix64, Rng};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type State = usize;
pub type Letter = usize;
pub type Word = Vec<Letter>;

/// A complete deterministic automaton without initial or final states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DfaJson", into = "DfaJson")]
pub struct Dfa {
    n: usize,
    k: usize,
    pub(crate) delta: Vec<u32>,
}

/// Wire shape of the automaton JSON.
#[derive(Serialize, Deserialize)]
struct DfaJson {
    n: u64,
    k: u64,
    delta: Vec<Vec<u64>>,
}

impl TryFrom<DfaJson> for Dfa {
    type Error = Error;

    fn try_from(raw: DfaJson) -> Result<Self> {
        let parse_err = |at: String, msg: String| Error::Parse { at, msg };
        if raw.n == 0 {
            return Err(parse_err("n".into(), "state count must be at least 1".into()));
        }
        if raw.k == 0 {
            return Err(parse_err("k".into(), "alphabet size must be at least 1".into()));
        }
        if raw.n > u32::MAX as u64 {
            return Err(parse_err("n".into(), format!("state count {} too large", raw.n)));
        }
        if raw.delta.len() as u64 != raw.k {
            return Err(parse_err(
                "delta".into(),
                format!("expected {} rows, found {}", raw.k, raw.delta.len()),
            ));
        }
        let n = raw.n as usize;
        let mut delta = Vec::with_capacity(n * raw.delta.len());
        for (x, row) in raw.delta.iter().enumerate() {
            if row.len() != n {
                return Err(parse_err(
                    format!("delta[{x}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (q, &t) in row.iter().enumerate() {
                if t >= raw.n {
                    return Err(parse_err(
                        format!("delta[{x}][{q}]"),
                        format!("entry {t} out of range"),
                    ));
                }
                delta.push(t as u32);
            }
        }
        Ok(Dfa { n, k: raw.k as usize, delta })
    }
}

impl From<Dfa> for DfaJson {
    fn from(d: Dfa) -> Self {
        DfaJson {
            n: d.n as u64,
            k: d.k as u64,
            delta: d.delta.chunks(d.n).map(|row| row.iter().map(|&t| t as u64).collect()).collect(),
        }
    }
}

impl Dfa {
    /// Builds an automaton from one successor map per letter.
    pub fn new(maps: Vec<Vec<usize>>) -> Result<Self> {
        let k = maps.len();
        if k == 0 {
            return Err(invalid("alphabet size must be at least 1"));
        }
        let n = maps[0].len();
        if n == 0 {
            return Err(invalid("state count must be at least 1"));
        }
        let mut delta = Vec::with_capacity(n * k);
        for (x, row) in maps.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!("letter {x} has {} entries, expected {n}", row.len())));
            }
            for &t in row {
                if t >= n {
                    return Err(invalid(format!("entry {t} out of range")));
                }
                delta.push(t as u32);
            }
        }
        Ok(Dfa { n, k, delta })
    }

    /// Builds an automaton from a letter-major flat table.
    pub fn from_flat(n: usize, k: usize, delta: Vec<u32>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid("n and k must be at least 1"));
        }
        if delta.len() != n * k {
            return Err(invalid(format!("table has {} entries, expected {}", delta.len(), n * k)));
        }
        if let Some(&t) = delta.iter().find(|&&t| t as usize >= n) {
            return Err(invalid(format!("entry {t} out of range")));
        }
        Ok(Dfa { n, k, delta })
    }

    /// Draws every transition independently and uniformly from `0..n`.
    pub fn random(n: usize, k: usize, rng: &mut Rng) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid(format!("random automaton needs n >= 1 and k >= 1, got n={n}, k={k}")));
        }
        if n > u32::MAX as usize {
            return Err(invalid(format!("state count {n} too large")));
        }
        let delta = (0..n * k).map(|_| rng.below(n as u64) as u32).collect();
        Ok(Dfa { n, k, delta })
    }

    /// The C_4 automaton of the Černý series: `a` is the cycle
    /// 0→1→2→3→0, `b` fixes 0, 1, 2 and sends 3 to 0.
    pub fn cerny(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("state count must be at least 1"));
        }
        let a = (0..n).map(|q| (q + 1) % n).collect();
        let b = (0..n).map(|q| if q == n - 1 { 0 } else { q }).collect();
        Dfa::new(vec![a, b])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn succ(&self, x: Letter, q: State) -> State {
        self.delta[x * self.n + q] as usize
    }

    /// The successor map of letter `x`.
    #[inline]
    pub fn row(&self, x: Letter) -> &[u32] {
        &self.delta[x * self.n..(x + 1) * self.n]
    }

    pub fn table(&self) -> &[u32] {
        &self.delta
    }

    pub fn check_state(&self, q: State) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(invalid(format!("state {q} out of range for n = {}", self.n)))
        }
    }

    pub fn check_letter(&self, x: Letter) -> Result<()> {
        if x < self.k {
            Ok(())
        } else {
            Err(invalid(format!("letter {x} out of range for k = {}", self.k)))
        }
    }

    /// `q.w`, applying letters left to right.
    pub fn apply_word(&self, q: State, w: &[Letter]) -> Result<State> {
        self.check_state(q)?;
        if let Some(&x) = w.iter().find(|&&x| x >= self.k) {
            return Err(invalid(format!("letter {x} out of range for k = {}", self.k)));
        }
        Ok(self.run(q, w))
    }

    /// Unchecked `q.w`.
    #[inline]
    pub(crate) fn run(&self, q: State, w: &[Letter]) -> State {
        w.iter().fold(q, |q, &x| self.succ(x, q))
    }

    /// `s.x` as a sorted, deduplicated set.
    pub fn image(&self, s: &[State], x: Letter) -> Result<Vec<State>> {
        self.check_letter(x)?;
        if let Some(&q) = s.iter().find(|&&q| q >= self.n) {
            return Err(invalid(format!("state {q} out of range for n = {}", self.n)));
        }
        let mut out: Vec<State> = s.iter().map(|&q| self.succ(x, q)).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// `Q.w` as a sorted set, computed by image iteration.
    pub fn image_of_word(&self, s: &[State], w: &[Letter]) -> Result<Vec<State>> {
        let mut cur: Vec<State> = s.to_vec();
        cur.sort_unstable();
        cur.dedup();
        for &x in w {
            cur = self.image(&cur, x)?;
        }
        Ok(cur)
    }

    /// True iff `w` maps every state to one common state.
    pub fn is_reset_word(&self, w: &[Letter]) -> bool {
        let all: Vec<State> = (0..self.n).collect();
        matches!(self.image_of_word(&all, w), Ok(img) if img.len() == 1)
    }

    /// Parses the automaton JSON interchange format.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DfaJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            at: format!("line {} column {}", e.line(), e.column()),
            msg: e.to_string(),
        })?;
        Dfa::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DfaJson::from(self.clone())).expect("integer tables always serialize")
    }
}
