use super::pairs::pair_graph_analysis;
use crate::automaton::{Dfa, State};
use crate::error::{Error, Result};

pub const MAX_CLIQUE_STATES: usize = 12;

/// All maximum-size sets of pairwise deadlock states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FCliqueSet {
    /// Each clique sorted; cliques in lexicographic order.
    pub cliques: Vec<Vec<State>>,
    pub size: usize,
}

/// Enumerates the F-cliques: maximum (not merely inclusion-maximal) cliques
/// of the deadlock-pair graph. Singletons count, so an automaton without
/// deadlock pairs has every singleton as an F-clique of size 1.
pub fn f_cliques(d: &Dfa) -> Result<FCliqueSet> {
    let n = d.n();
    if n > MAX_CLIQUE_STATES {
        return Err(Error::Capacity { what: "F-clique state count", got: n as u64, limit: MAX_CLIQUE_STATES as u64 });
    }
    let pg = pair_graph_analysis(d)?;
    let mut adj = vec![0u32; n];
    for &(p, q) in &pg.deadlock_pairs {
        adj[p] |= 1 << q;
        adj[q] |= 1 << p;
    }
    Ok(maximum_cliques(&adj))
}

/// Degeneracy order: repeatedly remove a vertex of minimum remaining degree.
fn degeneracy_order(adj: &[u32]) -> Vec<usize> {
    let n = adj.len();
    let mut alive: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut order = Vec::with_capacity(n);
    while alive != 0 {
        let v = (0..n)
            .filter(|&v| alive >> v & 1 == 1)
            .min_by_key(|&v| ((adj[v] & alive).count_ones(), v))
            .expect("alive vertex");
        order.push(v);
        alive &= !(1 << v);
    }
    order
}

/// Branch and bound over the degeneracy order. Each clique is generated once,
/// as an increasing sequence of order positions; a branch is cut as soon as
/// it cannot reach the best size found so far.
fn maximum_cliques(adj: &[u32]) -> FCliqueSet {
    let n = adj.len();
    let order = degeneracy_order(adj);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Neighbourhoods re-expressed over order positions.
    let nbr: Vec<u32> = order
        .iter()
        .map(|&v| (0..n).filter(|&u| adj[v] >> u & 1 == 1).fold(0u32, |m, u| m | 1 << pos[u]))
        .collect();

    struct Search<'a> {
        nbr: &'a [u32],
        best: usize,
        found: Vec<u32>,
    }
    impl Search<'_> {
        fn extend(&mut self, clique: u32, size: usize, candidates: u32) {
            if size + (candidates.count_ones() as usize) < self.best {
                return;
            }
            if candidates == 0 {
                if size > self.best {
                    self.best = size;
                    self.found.clear();
                }
                self.found.push(clique);
                return;
            }
            let mut rest = candidates;
            while rest != 0 {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                // Only later positions, so every clique is built in one order.
                let later = if i == 31 { 0 } else { !0u32 << (i + 1) };
                self.extend(clique | 1 << i, size + 1, candidates & self.nbr[i as usize] & later);
                if size + 1 + (rest.count_ones() as usize) < self.best {
                    break;
                }
            }
        }
    }

    let all: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut search = Search { nbr: &nbr, best: 0, found: Vec::new() };
    search.extend(0, 0, all);

    // Smaller leaves recorded early were dropped when `best` improved.
    let mut cliques: Vec<Vec<State>> = search
        .found
        .iter()
        .map(|&mask| {
            let mut c: Vec<State> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| order[i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    cliques.sort();
    cliques.dedup();
    FCliqueSet { size: search.best, cliques }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Rng;

    /// Every subset, checked pairwise.
    fn brute_force(adj: &[u32]) -> FCliqueSet {
        let n = adj.len();
        let mut best = 0;
        let mut cliques = Vec::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let ok = members.iter().all(|&v| (adj[v] | 1 << v) & mask == mask);
            if !ok {
                continue;
            }
            match members.len().cmp(&best) {
                std::cmp::Ordering::Greater => {
                    best = members.len();
                    cliques = vec![members];
                }
                std::cmp::Ordering::Equal => cliques.push(members),
                std::cmp::Ordering::Less => {}
            }
        }
        cliques.sort();
        FCliqueSet { cliques, size: best }
    }

    #[test]
    fn identity_pairs() {
        let d = Dfa::new(vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(f_cliques(&d).unwrap(), FCliqueSet { cliques: vec![vec![0, 1]], size: 2 });
        let d = Dfa::new(vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(f_cliques(&d).unwrap(), FCliqueSet { cliques: vec![vec![0, 1, 2]], size: 3 });
    }

    #[test]
    fn synchronizing_gives_singletons() {
        let f = f_cliques(&Dfa::cerny(4).unwrap()).unwrap();
        assert_eq!(f.size, 1);
        assert_eq!(f.cliques, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn capacity() {
        let d = Dfa::new(vec![vec![0; 13]]).unwrap();
        assert!(matches!(f_cliques(&d), Err(Error::Capacity { .. })));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = Rng::new(17);
        for _ in 0..2000 {
            let n = 1 + rng.below(12) as usize;
            let density = rng.next_f64();
            let mut adj = vec![0u32; n];
            for v in 0..n {
                for u in v + 1..n {
                    if rng.next_f64() < density {
                        adj[v] |= 1 << u;
                        adj[u] |= 1 << v;
                    }
                }
            }
            assert_eq!(maximum_cliques(&adj), brute_force(&adj), "adjacency {adj:?}");
        }
    }
}
