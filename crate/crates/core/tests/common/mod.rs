#![allow(dead_code)]

use proptest::prelude::*;
use synchro_core::{Dfa, Rng};

/// Arbitrary automata with `1..=max_n` states over `k` letters.
pub fn dfa(max_n: usize, k: usize) -> impl Strategy<Value = Dfa> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(0..n, n), k).prop_map(|maps| Dfa::new(maps).unwrap())
    })
}

/// Uniform random automata built from a proptest-chosen seed, for sizes
/// where shrinking the table itself is pointless.
pub fn seeded_dfa(ns: std::ops::RangeInclusive<usize>, k: usize) -> impl Strategy<Value = Dfa> {
    (ns, any::<u64>()).prop_map(move |(n, seed)| Dfa::random(n, k, &mut Rng::new(seed)).unwrap())
}

/// The automaton with every state `q` renamed to `perm[q]`.
pub fn relabel(d: &Dfa, perm: &[usize]) -> Dfa {
    let mut maps = vec![vec![0; d.n()]; d.k()];
    for (x, map) in maps.iter_mut().enumerate() {
        for q in 0..d.n() {
            map[perm[q]] = perm[d.succ(x, q)];
        }
    }
    Dfa::new(maps).unwrap()
}

/// States reachable from `start` under any word.
pub fn reachable(d: &Dfa, start: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; d.n()];
    let mut stack = start.to_vec();
    for &q in start {
        seen[q] = true;
    }
    while let Some(q) = stack.pop() {
        for x in 0..d.k() {
            let r = d.succ(x, q);
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen
}
