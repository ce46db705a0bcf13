//! Budgeted decision pipeline with exact fallback.
//!
//! On a random automaton the expensive quadratic pair table is almost never
//! needed. The pipeline rejects disconnected inputs in near-linear time,
//! probes the pair built from the unique highest tree of one letter (which
//! is stable whenever the automaton is synchronizing at all), and then builds
//! a reset word by collapsing `Q` onto that letter's cycles and merging the
//! few remaining states pair by pair. Every budget overrun falls back to
//! [`decide_exact`], so the verdict is always correct and always certified.

use crate::automaton::{is_weakly_connected, Dfa, Letter, State, Word};
use crate::error::Result;
use crate::funcgraph::{high_tree_stats, LetterGraph};
use crate::sync::{decide_exact, ordered, Certificate, Diagnostics, Method, PairSearch, PairSearcher, Verdict};

/// The pair `{p_high.x^(h−1), q}` read off a letter whose highest tree is
/// unique: `p_high` is a deepest state of that tree and `q` is the cyclic
/// predecessor of the tree's root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidatePair {
    pub letter: Letter,
    pub h: usize,
    pub p_high: State,
    pub p: State,
    pub q: State,
}

impl CandidatePair {
    pub fn pair(&self) -> (State, State) {
        ordered(self.p, self.q)
    }
}

pub fn candidate_stable_pair(d: &Dfa, x: Letter) -> Result<Option<CandidatePair>> {
    let lg = crate::funcgraph::analyze_letter(d, x)?;
    Ok(candidate_from_graph(&lg))
}

/// `None` unless one tree is strictly higher than every other (and has a
/// non-root vertex).
pub fn candidate_from_graph(lg: &LetterGraph) -> Option<CandidatePair> {
    let stats = high_tree_stats(lg);
    if !stats.unique_highest || stats.margin < 1 || stats.h1 < 1 {
        return None;
    }
    let h = stats.h1 as usize;
    let p_high = (0..lg.n()).find(|&s| lg.level(s) == h)?;
    let p = (1..h).fold(p_high, |s, _| lg.succ(s));
    let q = lg.cycle_predecessor(lg.root(p_high));
    Some(CandidatePair { letter: lg.letter(), h, p_high, p, q })
}

/// Multipliers of the three budgets, in units of `n`, `n` and `n^1.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetPolicy {
    /// Candidate-pair probe: `c1·n` pair edges.
    pub c1: f64,
    /// Each merge during collapse: `c2·n` pair edges.
    pub c2: f64,
    /// Whole collapse phase: `c3·n^1.5` operations.
    pub c3: f64,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy { c1: 8.0, c2: 8.0, c3: 8.0 }
    }
}

impl BudgetPolicy {
    pub fn scaled(self, factor: f64) -> Self {
        BudgetPolicy { c1: self.c1 * factor, c2: self.c2 * factor, c3: self.c3 * factor }
    }

    pub fn budget_for(&self, n: usize) -> Budget {
        let nf = n as f64;
        Budget {
            pair_walk: (self.c1 * nf).ceil() as u64,
            per_merge: (self.c2 * nf).ceil() as u64,
            collapse: (self.c3 * nf * nf.sqrt()).ceil() as u64,
            collapse_used: 0,
        }
    }
}

/// Concrete allowances for one automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub pair_walk: u64,
    pub per_merge: u64,
    pub collapse: u64,
    collapse_used: u64,
}

impl Budget {
    pub fn total(&self) -> u64 {
        self.pair_walk + self.collapse
    }

    pub fn collapse_remaining(&self) -> u64 {
        self.collapse - self.collapse_used
    }

    /// Charges against the collapse allowance; false if it would overrun.
    fn charge_collapse(&mut self, units: u64) -> bool {
        if units > self.collapse_remaining() {
            self.collapse_used = self.collapse;
            return false;
        }
        self.collapse_used += units;
        true
    }
}

/// Forward pair search from `pair` with at most `budget` pair edges.
pub fn budgeted_pair_merge(d: &Dfa, pair: (State, State), budget: u64) -> Result<PairSearch> {
    d.check_state(pair.0)?;
    d.check_state(pair.1)?;
    if pair.0 == pair.1 {
        return Err(crate::error::invalid("pair must consist of distinct states"));
    }
    Ok(PairSearcher::new().search(d, pair.0, pair.1, Some(budget)).0)
}

/// Runs the pipeline with a fresh scratch space. See [`FastDecider`] to
/// reuse allocations across many automata.
pub fn fast_decide(d: &Dfa, policy: BudgetPolicy) -> Result<Verdict> {
    FastDecider::new(policy).decide(d)
}

/// The fast pipeline with reusable scratch buffers.
#[derive(Debug)]
pub struct FastDecider {
    policy: BudgetPolicy,
    searcher: PairSearcher,
    mark: Vec<u32>,
    stamp: u32,
}

enum Exit {
    Verdict(bool, Certificate, Method),
    Fallback,
}

impl FastDecider {
    pub fn new(policy: BudgetPolicy) -> Self {
        FastDecider { policy, searcher: PairSearcher::new(), mark: Vec::new(), stamp: 0 }
    }

    pub fn policy(&self) -> BudgetPolicy {
        self.policy
    }

    pub fn decide(&mut self, d: &Dfa) -> Result<Verdict> {
        let mut budget = self.policy.budget_for(d.n());
        let mut steps = 0u64;
        let exit = self.run(d, &mut budget, &mut steps);
        let diagnostics = |steps, fallback| Diagnostics { steps, fallback, budget: Some(budget.total()) };
        match exit {
            Exit::Verdict(synchronizing, certificate, method) => {
                Ok(Verdict { synchronizing, certificate, method, diagnostics: diagnostics(steps, false) })
            }
            Exit::Fallback => {
                let exact = decide_exact(d)?;
                Ok(Verdict {
                    method: Method::Fallback,
                    diagnostics: diagnostics(steps + exact.diagnostics.steps, true),
                    ..exact
                })
            }
        }
    }

    fn run(&mut self, d: &Dfa, budget: &mut Budget, steps: &mut u64) -> Exit {
        let (n, k) = (d.n(), d.k());
        if n == 1 {
            return Exit::Verdict(true, Certificate::ResetWord(Word::new()), Method::FastCollapse);
        }

        // (1) weak connectivity: one union per arc.
        *steps += (k * n) as u64;
        let (connected, comps) = is_weakly_connected(d);
        if !connected {
            return Exit::Verdict(false, Certificate::Disconnected(comps), Method::FastConnectivity);
        }

        // (2) letter decompositions; prefer the larger highest-tree margin.
        let mut chosen: Option<(i64, LetterGraph, CandidatePair)> = None;
        for x in 0..k {
            *steps += n as u64;
            let lg = LetterGraph::from_map(d.row(x), x);
            let Some(cand) = candidate_from_graph(&lg) else { continue };
            let margin = high_tree_stats(&lg).margin;
            if chosen.as_ref().map_or(true, |(m, ..)| margin > *m) {
                chosen = Some((margin, lg, cand));
            }
        }
        let Some((_, lg, cand)) = chosen else { return Exit::Fallback };

        // (3) probe the candidate pair.
        let (outcome, used) = self.searcher.search(d, cand.p, cand.q, Some(budget.pair_walk));
        *steps += used;
        match outcome {
            PairSearch::Merged(_) => {}
            PairSearch::Deadlock => {
                let (p, q) = cand.pair();
                return Exit::Verdict(false, Certificate::DeadlockPair(p, q), Method::FastCandidate);
            }
            PairSearch::Exhausted => return Exit::Fallback,
        }

        // (4) collapse: x^n lands exactly on the cyclic states of x.
        let x = cand.letter;
        *steps += n as u64;
        if !budget.charge_collapse(n as u64) {
            return Exit::Fallback;
        }
        let mut current: Vec<State> = lg.cyclic_states().collect();
        let mut word: Word = vec![x; n];
        if self.mark.len() < n {
            self.mark = vec![0; n];
            self.stamp = 0;
        }
        while current.len() > 1 {
            let (p, q) = (current[0], current[1]);
            let allowance = budget.per_merge.min(budget.collapse_remaining());
            let (outcome, used) = self.searcher.search(d, p, q, Some(allowance));
            *steps += used;
            budget.charge_collapse(used);
            let w = match outcome {
                PairSearch::Merged(w) => w,
                PairSearch::Deadlock => {
                    let (p, q) = ordered(p, q);
                    return Exit::Verdict(false, Certificate::DeadlockPair(p, q), Method::FastCollapse);
                }
                PairSearch::Exhausted => return Exit::Fallback,
            };
            let cost = (w.len() * current.len()) as u64;
            *steps += cost;
            if !budget.charge_collapse(cost) {
                return Exit::Fallback;
            }
            current = self.apply(d, &current, &w);
            word.extend(w);
        }
        Exit::Verdict(true, Certificate::ResetWord(word), Method::FastCollapse)
    }

    /// `set.w`, sorted.
    fn apply(&mut self, d: &Dfa, set: &[State], w: &[Letter]) -> Vec<State> {
        let mut current = set.to_vec();
        for &x in w {
            self.stamp = self.stamp.wrapping_add(1);
            if self.stamp == 0 {
                self.mark.iter_mut().for_each(|m| *m = 0);
                self.stamp = 1;
            }
            let mut next = Vec::with_capacity(current.len());
            for &s in &current {
                let t = d.succ(x, s);
                if self.mark[t] != self.stamp {
                    self.mark[t] = self.stamp;
                    next.push(t);
                }
            }
            current = next;
        }
        current.sort_unstable();
        current
    }
}

/// Chains of pairs grown from `seed`, alternating letters round by round:
/// round `r` follows letter `r mod k` from every pair collected so far that
/// has not yet been followed by that letter. Stops at `count` distinct pairs
/// or when a full sweep of the alphabet adds nothing.
///
/// The output is stable whenever the seed is; nothing here checks that.
pub fn harvest_stable_pairs(d: &Dfa, seed: (State, State), count: usize) -> Result<Vec<(State, State)>> {
    d.check_state(seed.0)?;
    d.check_state(seed.1)?;
    if seed.0 == seed.1 {
        return Err(crate::error::invalid("seed pair must consist of distinct states"));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let k = d.k();
    let mut out = vec![ordered(seed.0, seed.1)];
    let mut seen: rustc_hash::FxHashSet<(State, State)> = out.iter().copied().collect();
    let mut followed = vec![0usize; k];
    let mut idle_rounds = 0;
    let mut round = 0usize;
    while out.len() < count && idle_rounds < k {
        let x = round % k;
        round += 1;
        let before = out.len();
        let upto = out.len();
        'pairs: for i in followed[x]..upto {
            let (mut p, mut q) = out[i];
            loop {
                p = d.succ(x, p);
                q = d.succ(x, q);
                if p == q {
                    break;
                }
                let pair = ordered(p, q);
                if !seen.insert(pair) {
                    break;
                }
                out.push(pair);
                if out.len() == count {
                    break 'pairs;
                }
            }
        }
        followed[x] = upto;
        idle_rounds = if out.len() == before { idle_rounds + 1 } else { 0 };
    }
    Ok(out)
}
