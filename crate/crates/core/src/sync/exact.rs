use super::pairs::{check_pair_capacity, pair_index, MergeTable};
use super::verdict::{Certificate, Diagnostics, Method, Verdict};
use crate::automaton::{is_weakly_connected, Dfa, State, Word};
use crate::error::{Error, Result};

/// Exact decision: weak connectivity, then the full backward pair search.
/// A positive verdict carries a greedy reset word.
pub fn decide_exact(d: &Dfa) -> Result<Verdict> {
    let exact = |synchronizing, certificate, steps| Verdict {
        synchronizing,
        certificate,
        method: Method::Exact,
        diagnostics: Diagnostics { steps, fallback: false, budget: None },
    };
    if d.n() == 1 {
        return Ok(exact(true, Certificate::ResetWord(Word::new()), 0));
    }
    check_pair_capacity(d.n())?;
    let mut steps = (d.k() * d.n()) as u64;
    let (connected, comps) = is_weakly_connected(d);
    if !connected {
        return Ok(exact(false, Certificate::Disconnected(comps), steps));
    }
    let (table, bfs_steps) = MergeTable::build(d)?;
    steps += bfs_steps;
    if let Some((p, q)) = table.first_deadlock() {
        return Ok(exact(false, Certificate::DeadlockPair(p, q), steps));
    }
    let (word, greedy_steps) = greedy_from_table(d, &table);
    steps += greedy_steps;
    Ok(exact(true, Certificate::ResetWord(word), steps))
}

/// Greedy pair merging over a complete table: while the current image has
/// two or more states, append a shortest merging word of the closest pair in
/// it (ties to the smallest pair index) and apply that word to the image.
///
/// The table must have every pair mergeable. Returns the word and the number
/// of pair lookups plus letter applications.
pub(crate) fn greedy_from_table(d: &Dfa, table: &MergeTable) -> (Word, u64) {
    let mut current: Vec<State> = (0..d.n()).collect();
    let mut mark = vec![0u32; d.n()];
    let mut stamp = 0u32;
    let mut word = Word::new();
    let mut steps = 0u64;
    while current.len() > 1 {
        let mut best: Option<(usize, usize, State, State)> = None;
        for (j, &q) in current.iter().enumerate() {
            for &p in &current[..j] {
                steps += 1;
                let dist = table.distance(p, q).expect("greedy needs a synchronizing table");
                let key = (dist, pair_index(p, q));
                if best.map_or(true, |(bd, bi, ..)| key < (bd, bi)) {
                    best = Some((key.0, key.1, p, q));
                }
            }
        }
        let (_, _, p, q) = best.expect("at least one pair");
        let w = table.word(d, p, q).expect("mergeable");
        for &x in &w {
            stamp += 1;
            let mut next = Vec::with_capacity(current.len());
            for &s in &current {
                steps += 1;
                let t = d.succ(x, s);
                if mark[t] != stamp {
                    mark[t] = stamp;
                    next.push(t);
                }
            }
            current = next;
        }
        current.sort_unstable();
        word.extend(w);
    }
    (word, steps)
}

/// Greedy reset word, or `None` for a non-synchronizing automaton.
pub fn greedy_reset_word(d: &Dfa) -> Result<Option<Word>> {
    if d.n() == 1 {
        return Ok(Some(Word::new()));
    }
    let (table, _) = MergeTable::build(d)?;
    if !table.all_mergeable() {
        return Ok(None);
    }
    Ok(Some(greedy_from_table(d, &table).0))
}

pub const MAX_SUBSET_SEARCH_STATES: usize = 16;

/// A minimum-length reset word by breadth-first search over subsets.
pub fn shortest_reset_word(d: &Dfa) -> Result<Option<Word>> {
    let n = d.n();
    if n > MAX_SUBSET_SEARCH_STATES {
        return Err(Error::Capacity {
            what: "subset search state count",
            got: n as u64,
            limit: MAX_SUBSET_SEARCH_STATES as u64,
        });
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    const UNSEEN: u32 = u32::MAX;
    let mut parent = vec![UNSEEN; 1 << n];
    let mut via = vec![0u16; 1 << n];
    parent[full as usize] = full;
    let mut queue = vec![full];
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        if s.count_ones() == 1 {
            let mut w = Word::new();
            let mut cur = s;
            while cur != full {
                w.push(via[cur as usize] as usize);
                cur = parent[cur as usize];
            }
            w.reverse();
            return Ok(Some(w));
        }
        for x in 0..d.k() {
            let row = d.row(x);
            let mut img = 0u32;
            let mut bits = s;
            while bits != 0 {
                let q = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                img |= 1 << row[q];
            }
            if parent[img as usize] == UNSEEN {
                parent[img as usize] = s;
                via[img as usize] = x as u16;
                queue.push(img);
            }
        }
    }
    Ok(None)
}
