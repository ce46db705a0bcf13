//! Functional-graph decomposition of a single letter.
//!
//! The underlying digraph of one letter has out-degree one everywhere. Its
//! weak components ("clusters") each contain exactly one cycle, with a tree
//! hanging off every cyclic vertex. Levels measure the distance to the cycle.

use num_bigint::BigUint;
use serde::Serialize;

use crate::automaton::{Dfa, Letter, State, UnionFind};
use crate::error::{invalid, Result};

/// One cluster: its size and its cycle listed in cyclic order, starting from
/// the smallest cyclic state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub size: usize,
    pub cycle: Vec<State>,
}

impl Cluster {
    pub fn cycle_length(&self) -> usize {
        self.cycle.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterGraph {
    n: usize,
    letter: Letter,
    succ: Vec<u32>,
    cluster_id: Vec<u32>,
    is_cyclic: Vec<bool>,
    level: Vec<u32>,
    /// Cyclic vertex whose tree contains the state.
    root: Vec<u32>,
    /// Index of the state (or of its root) within its cluster's cycle.
    cycle_pos: Vec<u32>,
    /// Height of the tree rooted at each cyclic state; 0 elsewhere.
    tree_height: Vec<u32>,
    clusters: Vec<Cluster>,
}

/// Decomposes the functional graph of letter `x` in linear time.
pub fn analyze_letter(d: &Dfa, x: Letter) -> Result<LetterGraph> {
    d.check_letter(x)?;
    Ok(LetterGraph::from_map(d.row(x), x))
}

impl LetterGraph {
    /// Decomposes an arbitrary map `q ↦ succ[q]` on `0..succ.len()`.
    pub fn from_map(succ: &[u32], letter: Letter) -> Self {
        let n = succ.len();
        const NEW: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let mut color = vec![NEW; n];
        let mut is_cyclic = vec![false; n];
        let mut path: Vec<u32> = Vec::new();
        let mut path_pos = vec![0u32; n];

        // Pointer chasing: a walk that runs into its own path closes a cycle.
        for start in 0..n {
            if color[start] != NEW {
                continue;
            }
            path.clear();
            let mut v = start;
            while color[v] == NEW {
                color[v] = ON_PATH;
                path_pos[v] = path.len() as u32;
                path.push(v as u32);
                v = succ[v] as usize;
            }
            if color[v] == ON_PATH {
                for &c in &path[path_pos[v] as usize..] {
                    is_cyclic[c as usize] = true;
                }
            }
            for &p in &path {
                color[p as usize] = DONE;
            }
        }

        // Reverse adjacency in CSR form.
        let mut offsets = vec![0u32; n + 1];
        for &t in succ {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut preds = vec![0u32; n];
        for (q, &t) in succ.iter().enumerate() {
            preds[fill[t as usize] as usize] = q as u32;
            fill[t as usize] += 1;
        }

        // Cycles in cyclic order from their smallest state; clusters are
        // therefore numbered by their smallest cyclic state for now.
        let mut cluster_id = vec![u32::MAX; n];
        let mut cycle_pos = vec![0u32; n];
        let mut cycles: Vec<Vec<State>> = Vec::new();
        for q in 0..n {
            if !is_cyclic[q] || cluster_id[q] != u32::MAX {
                continue;
            }
            let id = cycles.len() as u32;
            let mut cycle = Vec::new();
            let mut v = q;
            loop {
                cluster_id[v] = id;
                cycle_pos[v] = cycle.len() as u32;
                cycle.push(v);
                v = succ[v] as usize;
                if v == q {
                    break;
                }
            }
            cycles.push(cycle);
        }

        // Reverse BFS from every cycle assigns levels, roots and clusters.
        let mut level = vec![0u32; n];
        let mut root = vec![0u32; n];
        let mut tree_height = vec![0u32; n];
        let mut sizes = vec![0usize; cycles.len()];
        let mut queue: Vec<u32> = Vec::with_capacity(n);
        for q in 0..n {
            if is_cyclic[q] {
                root[q] = q as u32;
                queue.push(q as u32);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head] as usize;
            head += 1;
            sizes[cluster_id[v] as usize] += 1;
            let r = root[v] as usize;
            tree_height[r] = tree_height[r].max(level[v]);
            for &p in &preds[offsets[v] as usize..offsets[v + 1] as usize] {
                let p = p as usize;
                if is_cyclic[p] {
                    continue;
                }
                level[p] = level[v] + 1;
                root[p] = r as u32;
                cluster_id[p] = cluster_id[v];
                cycle_pos[p] = cycle_pos[r];
                queue.push(p as u32);
            }
        }

        // Renumber clusters by smallest member state.
        let mut renumber = vec![u32::MAX; cycles.len()];
        let mut next = 0u32;
        for q in 0..n {
            let c = cluster_id[q] as usize;
            if renumber[c] == u32::MAX {
                renumber[c] = next;
                next += 1;
            }
        }
        for c in cluster_id.iter_mut() {
            *c = renumber[*c as usize];
        }
        let mut clusters = vec![Cluster { size: 0, cycle: Vec::new() }; cycles.len()];
        for (old, cycle) in cycles.into_iter().enumerate() {
            clusters[renumber[old] as usize] = Cluster { size: sizes[old], cycle };
        }

        LetterGraph {
            n,
            letter,
            succ: succ.to_vec(),
            cluster_id,
            is_cyclic,
            level,
            root,
            cycle_pos,
            tree_height,
            clusters,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter(&self) -> Letter {
        self.letter
    }

    pub fn succ(&self, q: State) -> State {
        self.succ[q] as usize
    }

    pub fn cluster_of(&self, q: State) -> usize {
        self.cluster_id[q] as usize
    }

    pub fn is_cyclic(&self, q: State) -> bool {
        self.is_cyclic[q]
    }

    pub fn level(&self, q: State) -> usize {
        self.level[q] as usize
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    /// The cyclic state at the root of `q`'s tree.
    pub fn root(&self, q: State) -> State {
        self.root[q] as usize
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cyclic_states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.n).filter(|&q| self.is_cyclic[q])
    }

    pub fn cyclic_count(&self) -> usize {
        self.clusters.iter().map(Cluster::cycle_length).sum()
    }

    pub fn max_level(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0) as usize
    }

    /// Height of the tree rooted at cyclic state `r`.
    pub fn tree_height(&self, r: State) -> usize {
        debug_assert!(self.is_cyclic[r]);
        self.tree_height[r] as usize
    }

    /// One entry per cyclic vertex, in increasing state order.
    pub fn tree_heights(&self) -> Vec<usize> {
        self.cyclic_states().map(|r| self.tree_height[r] as usize).collect()
    }

    /// The cyclic predecessor of cyclic state `r`.
    pub fn cycle_predecessor(&self, r: State) -> State {
        let cycle = &self.clusters[self.cluster_of(r)].cycle;
        let pos = self.cycle_pos[r] as usize;
        cycle[(pos + cycle.len() - 1) % cycle.len()]
    }

    /// `q.x^t` in `O(1)` once the decomposition exists.
    pub fn eventual_cycle_vertex(&self, q: State, t: usize) -> Result<State> {
        if q >= self.n {
            return Err(invalid(format!("state {q} out of range for n = {}", self.n)));
        }
        let lvl = self.level(q);
        if t < lvl {
            return Err(invalid(format!("exponent {t} below level {lvl} of state {q}")));
        }
        let cycle = &self.clusters[self.cluster_of(q)].cycle;
        let pos = self.cycle_pos[q] as usize;
        Ok(cycle[(pos + (t - lvl) % cycle.len()) % cycle.len()])
    }

    pub fn summary(&self) -> LetterSummary {
        LetterSummary {
            letter: self.letter,
            n: self.n,
            cluster: self.cluster_id.clone(),
            level: self.level.clone(),
            cyclic: self.is_cyclic.clone(),
            clusters: self.clusters.clone(),
            cycle_count: cycle_count(self),
            tree_heights: self.tree_heights(),
            high_tree: high_tree_stats(self),
        }
    }
}

/// Serializable view used by the `analyze` command.
#[derive(Debug, Clone, Serialize)]
pub struct LetterSummary {
    pub letter: Letter,
    pub n: usize,
    pub cluster: Vec<u32>,
    pub level: Vec<u32>,
    pub cyclic: Vec<bool>,
    pub clusters: Vec<Cluster>,
    pub cycle_count: usize,
    pub tree_heights: Vec<usize>,
    pub high_tree: HighTreeStats,
}

/// Number of clusters (equivalently, of cycles).
pub fn cycle_count(lg: &LetterGraph) -> usize {
    lg.clusters.len()
}

/// Statistics of the two highest trees.
///
/// `h2` is −1 when there is a single tree, so that the counts at levels
/// `h2 + 1` and `≥ h2 + 2` stay well defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HighTreeStats {
    pub h1: i64,
    pub h2: i64,
    pub unique_highest: bool,
    pub margin: i64,
    /// Vertices at level `h2 + 1`.
    pub n1: usize,
    /// Vertices at level `≥ h2 + 2`.
    pub n2: usize,
}

pub fn high_tree_stats(lg: &LetterGraph) -> HighTreeStats {
    let mut heights = lg.tree_heights();
    heights.sort_unstable_by(|a, b| b.cmp(a));
    let h1 = heights[0] as i64;
    let h2 = heights.get(1).map_or(-1, |&h| h as i64);
    let unique_highest = heights.get(1).map_or(true, |&h| (h as i64) < h1);
    let mut n1 = 0;
    let mut n2 = 0;
    for &l in &lg.level {
        let l = l as i64;
        if l == h2 + 1 {
            n1 += 1;
        } else if l >= h2 + 2 {
            n2 += 1;
        }
    }
    HighTreeStats { h1, h2, unique_highest, margin: h1 - h2, n1, n2 }
}

/// Split of the clusters by size at `n^θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    pub threshold_exponent: f64,
    /// `⌊n^θ⌋`; a cluster is big iff its size exceeds this.
    pub threshold: usize,
    pub big_clusters: Vec<usize>,
    /// States of all clusters of size at most `n^θ`, increasing.
    pub small_states: Vec<State>,
    pub small_count: usize,
}

pub const DEFAULT_THRESHOLD_EXPONENT: f64 = 0.45;

/// `⌊n^θ⌋`, exact. The float estimate is only trusted away from integers;
/// near an integer `m` the question `m ≤ n^θ` is settled with integers by
/// writing θ as a rational `p/q` and comparing `m^q` against `n^p`.
pub fn floor_power(n: usize, theta: f64) -> usize {
    let est = (n as f64).powf(theta);
    let m = est.round();
    if (est - m).abs() > 1e-6 * m.max(1.0) {
        return est.floor() as usize;
    }
    let m = m as u64;
    match rational_approx(theta) {
        Some((p, q)) => {
            let lhs = BigUint::from(m).pow(q as u32);
            let rhs = BigUint::from(n as u64).pow(p as u32);
            if lhs <= rhs {
                m as usize
            } else {
                m as usize - 1
            }
        }
        None => est.floor() as usize,
    }
}

/// Best rational `p/q` with `q ≤ 1000` that reproduces θ to within 1e-12.
fn rational_approx(theta: f64) -> Option<(u64, u64)> {
    (1..=1000u64).find_map(|q| {
        let p = (theta * q as f64).round();
        ((p / q as f64 - theta).abs() < 1e-12 && p >= 0.0).then_some((p as u64, q))
    })
}

pub fn cluster_partition(lg: &LetterGraph, theta: f64) -> Result<ClusterPartition> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid(format!("threshold exponent must lie in (0, 1), got {theta}")));
    }
    let threshold = floor_power(lg.n, theta);
    let big_clusters: Vec<usize> =
        (0..lg.clusters.len()).filter(|&c| lg.clusters[c].size > threshold).collect();
    let small_states: Vec<State> =
        (0..lg.n).filter(|&q| lg.clusters[lg.cluster_of(q)].size <= threshold).collect();
    Ok(ClusterPartition {
        threshold_exponent: theta,
        threshold,
        big_clusters,
        small_count: small_states.len(),
        small_states,
    })
}

/// True iff the big clusters form a connected graph under the edges induced
/// by `pairs`. Pairs with an endpoint in a small cluster are ignored.
pub fn clusters_connected_by_pairs(lg: &LetterGraph, pairs: &[(State, State)], theta: f64) -> Result<bool> {
    let part = cluster_partition(lg, theta)?;
    if part.big_clusters.len() <= 1 {
        return Ok(true);
    }
    let mut slot = vec![usize::MAX; lg.clusters.len()];
    for (i, &c) in part.big_clusters.iter().enumerate() {
        slot[c] = i;
    }
    let mut uf = UnionFind::new(part.big_clusters.len());
    let mut parts = part.big_clusters.len();
    for &(p, q) in pairs {
        if p >= lg.n || q >= lg.n {
            return Err(invalid(format!("pair ({p}, {q}) out of range for n = {}", lg.n)));
        }
        let (a, b) = (slot[lg.cluster_of(p)], slot[lg.cluster_of(q)]);
        if a != usize::MAX && b != usize::MAX && uf.union(a, b) {
            parts -= 1;
        }
    }
    Ok(parts == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Dfa {
        Dfa::cerny(4).unwrap()
    }

    fn map(succ: &[u32]) -> LetterGraph {
        LetterGraph::from_map(succ, 0)
    }

    #[test]
    fn c4_letter_a_is_one_cycle() {
        let lg = analyze_letter(&c4(), 0).unwrap();
        assert_eq!(lg.clusters(), &[Cluster { size: 4, cycle: vec![0, 1, 2, 3] }]);
        assert!((0..4).all(|q| lg.level(q) == 0));
        assert_eq!(lg.tree_heights(), vec![0, 0, 0, 0]);
        assert_eq!(cycle_count(&lg), 1);
    }

    #[test]
    fn c4_letter_b_decomposition() {
        let lg = analyze_letter(&c4(), 1).unwrap();
        assert_eq!(
            lg.clusters(),
            &[
                Cluster { size: 2, cycle: vec![0] },
                Cluster { size: 1, cycle: vec![1] },
                Cluster { size: 1, cycle: vec![2] },
            ]
        );
        assert_eq!(lg.cluster_of(3), 0);
        assert_eq!(lg.level(3), 1);
        assert_eq!(lg.tree_heights(), vec![1, 0, 0]);
        assert_eq!(cycle_count(&lg), 3);
    }

    #[test]
    fn chain_into_fixed_point() {
        let lg = map(&[1, 2, 2]);
        assert_eq!(lg.clusters(), &[Cluster { size: 3, cycle: vec![2] }]);
        assert_eq!((lg.level(0), lg.level(1), lg.level(2)), (2, 1, 0));
        assert_eq!(lg.tree_heights(), vec![2]);
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(cycle_count(&map(&(0..10).collect::<Vec<_>>())), 10);
        assert_eq!(cycle_count(&map(&[1, 2, 3, 4, 0])), 1);
        assert!(analyze_letter(&c4(), 2).is_err());
    }

    #[test]
    fn high_tree_examples() {
        let s = high_tree_stats(&analyze_letter(&c4(), 0).unwrap());
        assert_eq!((s.h1, s.h2, s.unique_highest, s.margin), (0, 0, false, 0));

        let s = high_tree_stats(&map(&[0, 0, 1, 3, 3]));
        assert_eq!(s, HighTreeStats { h1: 2, h2: 1, unique_highest: true, margin: 1, n1: 1, n2: 0 });

        let s = high_tree_stats(&map(&[1, 2, 2]));
        assert_eq!(s, HighTreeStats { h1: 2, h2: -1, unique_highest: true, margin: 3, n1: 1, n2: 2 });
        assert!(s.n2 > s.n1);
    }

    #[test]
    fn partition_examples() {
        let lg = analyze_letter(&c4(), 1).unwrap();
        let p = cluster_partition(&lg, 0.45).unwrap();
        assert_eq!(p.threshold, 1);
        assert_eq!(p.big_clusters, vec![0]);
        assert_eq!(p.small_states, vec![1, 2]);
        assert_eq!(p.small_count, 2);

        let p = cluster_partition(&map(&[1, 2, 3, 4, 5, 0]), 0.9).unwrap();
        assert_eq!(p.big_clusters, vec![0]);
        assert!(p.small_states.is_empty());

        let id: Vec<u32> = (0..100).collect();
        let p = cluster_partition(&map(&id), 0.45).unwrap();
        assert!(p.big_clusters.is_empty());
        assert_eq!(p.small_count, 100);

        assert!(cluster_partition(&lg, 0.0).is_err());
        assert!(cluster_partition(&lg, 1.0).is_err());
    }

    #[test]
    fn floor_power_at_exact_boundary() {
        // 2^20 raised to 9/20 is exactly 512.
        assert_eq!(floor_power(1 << 20, 0.45), 512);
        assert_eq!(floor_power((1 << 20) - 1, 0.45), 511);
        assert_eq!(floor_power(100, 0.5), 10);
        assert_eq!(floor_power(99, 0.5), 9);
        assert_eq!(floor_power(4, 0.45), 1);
    }

    #[test]
    fn eventual_cycle_examples() {
        assert_eq!(map(&[1, 2, 2]).eventual_cycle_vertex(0, 3).unwrap(), 2);
        let a = analyze_letter(&c4(), 0).unwrap();
        assert_eq!(a.eventual_cycle_vertex(1, 4).unwrap(), 1);
        let b = analyze_letter(&c4(), 1).unwrap();
        assert_eq!(b.eventual_cycle_vertex(3, 4).unwrap(), 0);
        assert!(map(&[1, 2, 2]).eventual_cycle_vertex(0, 1).is_err());
    }

    #[test]
    fn cycle_predecessor_on_cycles() {
        let a = analyze_letter(&c4(), 0).unwrap();
        assert_eq!(a.cycle_predecessor(0), 3);
        assert_eq!(a.cycle_predecessor(2), 1);
        assert_eq!(map(&[1, 2, 2]).cycle_predecessor(2), 2);
    }

    #[test]
    fn cluster_connectivity_examples() {
        // Two 3-cycles: 0→1→2→0 and 3→4→5→3; 6^0.45 ≈ 2.24 so both are big.
        let two = map(&[1, 2, 0, 4, 5, 3]);
        assert!(!clusters_connected_by_pairs(&two, &[], 0.45).unwrap());
        assert!(clusters_connected_by_pairs(&two, &[(1, 5)], 0.45).unwrap());
        let one = map(&[1, 2, 3, 4, 5, 0]);
        assert!(clusters_connected_by_pairs(&one, &[], 0.45).unwrap());
        // A pair through a small cluster does not bridge.
        let with_small = map(&[1, 2, 0, 4, 5, 3, 6]);
        assert!(!clusters_connected_by_pairs(&with_small, &[(0, 6), (6, 3)], 0.45).unwrap());
    }
}
