use rayon::prelude::*;

use crate::automaton::Dfa;
use crate::error::{Error, Result};

/// Upper bound on `n^(k·n)` for exhaustive enumeration.
pub const MAX_ENUMERATED: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub automata: u64,
}

fn table_count(n: usize, k: usize) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(crate::error::invalid("n and k must be at least 1"));
    }
    let mut total: u64 = 1;
    for _ in 0..n * k {
        total = total.saturating_mul(n as u64);
        if total > MAX_ENUMERATED {
            return Err(Error::Capacity { what: "enumerated automata", got: total, limit: MAX_ENUMERATED });
        }
    }
    Ok(total)
}

/// Visits every automaton with `n` states over `k` letters exactly once, in
/// lexicographic order of the letter-major table (the last entry varies
/// fastest).
pub fn enumerate_all(n: usize, k: usize, mut visitor: impl FnMut(&Dfa)) -> Result<EnumerationSummary> {
    table_count(n, k)?;
    let automata = visit_from(n, k, 0, |d| visitor(d));
    Ok(EnumerationSummary { automata })
}

/// Walks every table that shares the first `fixed` entries already written
/// into `d`.
fn walk(n: usize, fixed: usize, d: &mut Dfa, visitor: &mut impl FnMut(&Dfa)) -> u64 {
    let len = d.delta.len();
    for t in &mut d.delta[fixed..] {
        *t = 0;
    }
    let mut count = 0;
    loop {
        visitor(d);
        count += 1;
        // Odometer step over the free suffix.
        let mut i = len;
        loop {
            if i == fixed {
                return count;
            }
            i -= 1;
            if (d.delta[i] as usize) + 1 < n {
                d.delta[i] += 1;
                break;
            }
            d.delta[i] = 0;
        }
    }
}

fn visit_from(n: usize, k: usize, fixed: usize, mut visitor: impl FnMut(&Dfa)) -> u64 {
    let mut d = Dfa::from_flat(n, k, vec![0; n * k]).expect("zero table is valid");
    walk(n, fixed, &mut d, &mut visitor)
}

/// Parallel fold over all automata, sharded by the first table entry.
/// `fold` and `merge` must be commutative and associative for the result to
/// be independent of scheduling.
pub fn enumerate_fold<T, I, F, M>(n: usize, k: usize, init: I, fold: F, merge: M) -> Result<(T, EnumerationSummary)>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &Dfa) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    table_count(n, k)?;
    let (acc, automata) = (0..n as u32)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut d = Dfa::from_flat(n, k, vec![0; n * k]).expect("zero table is valid");
            d.delta[0] = first;
            let count = walk(n, 1, &mut d, &mut |d| fold(&mut acc, d));
            (acc, count)
        })
        .reduce(|| (init(), 0), |(a, ca), (b, cb)| (merge(a, b), ca + cb));
    Ok((acc, EnumerationSummary { automata }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_and_order() {
        let mut seen = Vec::new();
        let s = enumerate_all(2, 2, |d| seen.push(d.table().to_vec())).unwrap();
        assert_eq!(s.automata, 16);
        assert_eq!(seen[0], vec![0, 0, 0, 0]);
        assert_eq!(seen[1], vec![0, 0, 0, 1]);
        assert_eq!(seen[15], vec![1, 1, 1, 1]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert_eq!(seen.iter().collect::<HashSet<_>>().len(), 16);
    }

    #[test]
    fn single_state() {
        assert_eq!(enumerate_all(1, 2, |_| {}).unwrap().automata, 1);
    }

    #[test]
    fn capacity() {
        assert!(matches!(enumerate_all(6, 2, |_| {}), Err(Error::Capacity { .. })));
        assert_eq!(table_count(5, 2).unwrap(), 9_765_625);
    }

    #[test]
    fn fold_matches_sequential() {
        let mut seq = 0u64;
        enumerate_all(3, 2, |d| seq += d.table().iter().map(|&t| t as u64).sum::<u64>()).unwrap();
        let (par, s) = enumerate_fold(
            3,
            2,
            || 0u64,
            |acc, d| *acc += d.table().iter().map(|&t| t as u64).sum::<u64>(),
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(s.automata, 729);
        assert_eq!(par, seq);
    }
}
