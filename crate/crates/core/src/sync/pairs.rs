//! The pair automaton: unordered pairs of distinct states, with the
//! diagonal (merged pairs) left implicit.

use rustc_hash::FxHashSet;

use crate::automaton::{Dfa, Letter, State, Word};
use crate::error::{Error, Result};

/// Largest state count for which the quadratic pair table is built.
pub const MAX_PAIR_TABLE_STATES: usize = 20_000;

/// Triangular index of `{p, q}` with `p != q`.
#[inline]
pub fn pair_index(p: State, q: State) -> usize {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    hi * (hi - 1) / 2 + lo
}

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `(min, max)` of two states.
#[inline]
pub fn ordered(p: State, q: State) -> (State, State) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(idx: usize) -> (State, State) {
    let mut hi = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as usize;
    while hi * (hi - 1) / 2 > idx {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= idx {
        hi += 1;
    }
    (idx - hi * (hi - 1) / 2, hi)
}

pub(crate) fn check_pair_capacity(n: usize) -> Result<()> {
    if n > MAX_PAIR_TABLE_STATES {
        return Err(Error::Capacity {
            what: "pair table state count",
            got: n as u64,
            limit: MAX_PAIR_TABLE_STATES as u64,
        });
    }
    Ok(())
}

/// Preimages of every state under every letter, in CSR layout.
pub(crate) struct Preimages {
    n: usize,
    offsets: Vec<u32>,
    preds: Vec<u32>,
}

impl Preimages {
    pub(crate) fn new(d: &Dfa) -> Self {
        let (n, k) = (d.n(), d.k());
        let mut offsets = vec![0u32; k * n + 1];
        for x in 0..k {
            for &t in d.row(x) {
                offsets[x * n + t as usize + 1] += 1;
            }
        }
        for i in 0..k * n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut preds = vec![0u32; k * n];
        for x in 0..k {
            for (q, &t) in d.row(x).iter().enumerate() {
                let slot = &mut fill[x * n + t as usize];
                preds[*slot as usize] = q as u32;
                *slot += 1;
            }
        }
        Preimages { n, offsets, preds }
    }

    #[inline]
    pub(crate) fn of(&self, x: Letter, r: State) -> &[u32] {
        let i = x * self.n + r;
        &self.preds[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Distances to the diagonal for every pair, from one backward BFS.
///
/// Each entry holds the distance (`UNMERGEABLE` for deadlock pairs) and the
/// first letter of a shortest merging word, side by side so that one lookup
/// touches one cache line.
#[derive(Debug, Clone)]
pub struct MergeTable {
    n: usize,
    entries: Vec<[u32; 2]>,
}

pub const UNMERGEABLE: u32 = u32::MAX;

impl MergeTable {
    /// Builds the table, returning it with the number of pair edges generated.
    pub fn build(d: &Dfa) -> Result<(Self, u64)> {
        check_pair_capacity(d.n())?;
        let (n, k) = (d.n(), d.k());
        let pre = Preimages::new(d);
        let m = pair_count(n);
        let mut entries = vec![[UNMERGEABLE, 0u32]; m];
        let mut queue: Vec<(u32, u32)> = Vec::new();
        let mut steps = 0u64;

        // Pairs merged by a single letter: all pairs inside one preimage bucket.
        for x in 0..k {
            for r in 0..n {
                let bucket = pre.of(x, r);
                for (i, &p) in bucket.iter().enumerate() {
                    for &q in &bucket[i + 1..] {
                        steps += 1;
                        let e = &mut entries[pair_index(p as usize, q as usize)];
                        if e[0] == UNMERGEABLE {
                            *e = [1, x as u32];
                            queue.push((p, q));
                        }
                    }
                }
            }
        }

        let mut head = 0;
        while head < queue.len() {
            let (p, q) = queue[head];
            head += 1;
            let next = entries[pair_index(p as usize, q as usize)][0] + 1;
            for x in 0..k {
                let pp = pre.of(x, p as usize);
                let qq = pre.of(x, q as usize);
                for &a in pp {
                    for &b in qq {
                        steps += 1;
                        let e = &mut entries[pair_index(a as usize, b as usize)];
                        if e[0] == UNMERGEABLE {
                            *e = [next, x as u32];
                            queue.push((a, b));
                        }
                    }
                }
            }
        }
        Ok((MergeTable { n, entries }, steps))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of a shortest merging word, `None` for a deadlock pair.
    pub fn distance(&self, p: State, q: State) -> Option<usize> {
        if p == q {
            return Some(0);
        }
        let dd = self.entries[pair_index(p, q)][0];
        (dd != UNMERGEABLE).then_some(dd as usize)
    }

    pub fn is_mergeable(&self, p: State, q: State) -> bool {
        self.distance(p, q).is_some()
    }

    /// A shortest merging word, read off the BFS tree.
    pub fn word(&self, d: &Dfa, mut p: State, mut q: State) -> Option<Word> {
        self.distance(p, q)?;
        let mut w = Word::new();
        while p != q {
            let x = self.entries[pair_index(p, q)][1] as usize;
            w.push(x);
            p = d.succ(x, p);
            q = d.succ(x, q);
        }
        Some(w)
    }

    pub(crate) fn raw_dist(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|e| e[0])
    }

    pub fn all_mergeable(&self) -> bool {
        self.raw_dist().all(|dd| dd != UNMERGEABLE)
    }

    pub fn first_deadlock(&self) -> Option<(State, State)> {
        self.raw_dist().position(|dd| dd == UNMERGEABLE).map(pair_from_index)
    }
}

/// Exact classification of all pairs.
#[derive(Debug, Clone)]
pub struct PairGraphResult {
    pub n: usize,
    table: MergeTable,
    stable: Vec<bool>,
    /// Deadlock pairs `(p, q)` with `p < q`, in index order.
    pub deadlock_pairs: Vec<(State, State)>,
    /// Pair edges generated by both backward searches.
    pub steps: u64,
}

impl PairGraphResult {
    pub fn is_mergeable(&self, p: State, q: State) -> bool {
        self.table.is_mergeable(p, q)
    }

    pub fn is_deadlock(&self, p: State, q: State) -> bool {
        !self.is_mergeable(p, q)
    }

    /// A pair is stable when no word leads it to a deadlock pair. A merged
    /// pair `{p, p}` is stable.
    pub fn is_stable(&self, p: State, q: State) -> bool {
        p == q || self.stable[pair_index(p, q)]
    }

    pub fn stable_pairs(&self) -> impl Iterator<Item = (State, State)> + '_ {
        self.stable.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| pair_from_index(i))
    }

    pub fn mergeable_pairs(&self) -> impl Iterator<Item = (State, State)> + '_ {
        self.table.raw_dist().enumerate().filter(|&(_, dd)| dd != UNMERGEABLE).map(|(i, _)| pair_from_index(i))
    }

    pub fn is_synchronizing(&self) -> bool {
        self.deadlock_pairs.is_empty()
    }

    pub fn merge_table(&self) -> &MergeTable {
        &self.table
    }
}

/// Mergeable pairs by backward BFS from the diagonal; stable pairs as the
/// complement of the backward closure of the deadlock pairs. `O(k·n²)`.
pub fn pair_graph_analysis(d: &Dfa) -> Result<PairGraphResult> {
    let (table, mut steps) = MergeTable::build(d)?;
    let (n, k) = (d.n(), d.k());
    let m = pair_count(n);
    let mut stable = vec![true; m];
    let mut queue: Vec<(u32, u32)> = Vec::new();
    let mut deadlock_pairs = Vec::new();
    for (idx, dd) in table.raw_dist().enumerate() {
        if dd == UNMERGEABLE {
            stable[idx] = false;
            let (p, q) = pair_from_index(idx);
            deadlock_pairs.push((p, q));
            queue.push((p as u32, q as u32));
        }
    }
    if !queue.is_empty() {
        let pre = Preimages::new(d);
        let mut head = 0;
        while head < queue.len() {
            let (p, q) = queue[head];
            head += 1;
            for x in 0..k {
                for &a in pre.of(x, p as usize) {
                    for &b in pre.of(x, q as usize) {
                        steps += 1;
                        let idx = pair_index(a as usize, b as usize);
                        if stable[idx] {
                            stable[idx] = false;
                            queue.push((a, b));
                        }
                    }
                }
            }
        }
    }
    Ok(PairGraphResult { n, table, stable, deadlock_pairs, steps })
}

/// Outcome of a forward search from one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSearch {
    /// Shortest merging word.
    Merged(Word),
    /// The whole forward closure was explored without reaching the diagonal.
    Deadlock,
    /// The budget ran out first.
    Exhausted,
}

/// Reusable scratch space for forward pair searches.
#[derive(Debug, Default)]
pub struct PairSearcher {
    seen: FxHashSet<u64>,
    // (p, q, parent slot, letter)
    nodes: Vec<(u32, u32, u32, u32)>,
}

impl PairSearcher {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forward BFS from `{p, q}`, charging one unit per generated pair edge.
    /// Returns the outcome and the units charged.
    pub fn search(&mut self, d: &Dfa, p: State, q: State, budget: Option<u64>) -> (PairSearch, u64) {
        if p == q {
            return (PairSearch::Merged(Word::new()), 0);
        }
        self.seen.clear();
        self.nodes.clear();
        let key = |a: usize, b: usize| {
            let (lo, hi) = ordered(a, b);
            ((hi as u64) << 32) | lo as u64
        };
        self.seen.insert(key(p, q));
        self.nodes.push((p as u32, q as u32, u32::MAX, 0));
        let mut used = 0u64;
        let mut head = 0;
        while head < self.nodes.len() {
            let (a, b, _, _) = self.nodes[head];
            for x in 0..d.k() {
                if budget.is_some_and(|limit| used >= limit) {
                    return (PairSearch::Exhausted, used);
                }
                used += 1;
                let (na, nb) = (d.succ(x, a as usize), d.succ(x, b as usize));
                if na == nb {
                    let mut w = vec![x];
                    let mut slot = head;
                    while self.nodes[slot].2 != u32::MAX {
                        w.push(self.nodes[slot].3 as usize);
                        slot = self.nodes[slot].2 as usize;
                    }
                    w.reverse();
                    return (PairSearch::Merged(w), used);
                }
                if self.seen.insert(key(na, nb)) {
                    self.nodes.push((na as u32, nb as u32, head as u32, x as u32));
                }
            }
            head += 1;
        }
        (PairSearch::Deadlock, used)
    }
}

/// Shortest word merging `p` and `q`, or `None` iff `{p, q}` is deadlock.
/// The empty word is returned when `p == q`.
pub fn merge_word(d: &Dfa, p: State, q: State) -> Result<Option<Word>> {
    d.check_state(p)?;
    d.check_state(q)?;
    match PairSearcher::new().search(d, p, q, None).0 {
        PairSearch::Merged(w) => Ok(Some(w)),
        _ => Ok(None),
    }
}

/// The chain `{p,q}, {p.x,q.x}, …, {p.x^len, q.x^len}`, cut before the first
/// merged pair. Pairs are reported as `(min, max)`.
pub fn propagate_pairs(d: &Dfa, seed: (State, State), x: Letter, length: usize) -> Result<Vec<(State, State)>> {
    let (mut p, mut q) = seed;
    d.check_state(p)?;
    d.check_state(q)?;
    d.check_letter(x)?;
    if p == q {
        return Err(crate::error::invalid("seed pair must consist of distinct states"));
    }
    let mut chain = vec![ordered(p, q)];
    for _ in 0..length {
        p = d.succ(x, p);
        q = d.succ(x, q);
        if p == q {
            break;
        }
        chain.push(ordered(p, q));
    }
    Ok(chain)
}
