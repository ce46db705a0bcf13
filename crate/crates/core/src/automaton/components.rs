use super::{Dfa, State};
use crate::error::{invalid, Result};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Weakly connected components of the underlying digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakComponents {
    /// Component label per state; labels are numbered in order of their
    /// smallest state.
    pub labels: Vec<u32>,
    pub count: usize,
}

impl WeakComponents {
    pub fn is_connected(&self) -> bool {
        self.count == 1
    }

    /// Checks that every arc stays inside one component and that the labels
    /// are dense.
    pub fn is_consistent_with(&self, d: &Dfa) -> bool {
        self.labels.len() == d.n()
            && self.labels.iter().all(|&l| (l as usize) < self.count)
            && (0..d.k()).all(|x| (0..d.n()).all(|q| self.labels[q] == self.labels[d.succ(x, q)]))
    }
}

/// Union-find over all `k·n` arcs.
pub fn is_weakly_connected(d: &Dfa) -> (bool, WeakComponents) {
    let n = d.n();
    let mut uf = UnionFind::new(n);
    for x in 0..d.k() {
        for (q, &t) in d.row(x).iter().enumerate() {
            uf.union(q, t as usize);
        }
    }
    let mut labels = vec![u32::MAX; n];
    let mut root_label = vec![u32::MAX; n];
    let mut count = 0u32;
    for q in 0..n {
        let r = uf.find(q);
        if root_label[r] == u32::MAX {
            root_label[r] = count;
            count += 1;
        }
        labels[q] = root_label[r];
    }
    let comps = WeakComponents { labels, count: count as usize };
    (comps.is_connected(), comps)
}

/// The minimal subautomata: strongly connected sets closed under every letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedComponents {
    /// Each component sorted; components ordered by their smallest state.
    pub components: Vec<Vec<State>>,
    pub sizes: Vec<usize>,
}

impl ClosedComponents {
    pub fn min_size(&self) -> usize {
        self.sizes.iter().copied().min().unwrap_or(0)
    }
}

/// Terminal strongly connected components, found with an iterative Tarjan
/// pass over the arcs `q → q.x`.
pub fn minimal_closed_components(d: &Dfa) -> ClosedComponents {
    let n = d.n();
    let k = d.k();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    // (state, next letter to explore)
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut next_index = 0u32;
    let mut comp_count = 0u32;

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call.push((start as u32, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start as u32);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut letter)) = call.last_mut() {
            let v = v as usize;
            if (*letter as usize) < k {
                let w = d.succ(*letter as usize, v);
                *letter += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    let u = u as usize;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow") as usize;
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }

    let mut terminal = vec![true; comp_count as usize];
    for x in 0..k {
        for q in 0..n {
            if comp[q] != comp[d.succ(x, q)] {
                terminal[comp[q] as usize] = false;
            }
        }
    }
    let mut slot = vec![usize::MAX; comp_count as usize];
    let mut components: Vec<Vec<State>> = Vec::new();
    for q in 0..n {
        let c = comp[q] as usize;
        if !terminal[c] {
            continue;
        }
        if slot[c] == usize::MAX {
            slot[c] = components.len();
            components.push(Vec::new());
        }
        components[slot[c]].push(q);
    }
    let sizes = components.iter().map(Vec::len).collect();
    ClosedComponents { components, sizes }
}

/// `(1/n)(1 − 2/n)^(n−1)`: the probability that a uniform 2-letter automaton
/// has one state fixed by both letters that no other state enters, while no
/// other state is fixed by both letters.
pub fn disconnected_singleton_probability(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(invalid(format!("formula needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    Ok((1.0 / nf) * (1.0 - 2.0 / nf).powi(n as i32 - 1))
}

/// Membership in the family counted by [`disconnected_singleton_probability`]:
/// exactly one state is fixed by every letter, and that state has no incoming
/// arc from any other state (so it is a singleton weak component).
pub fn has_exactly_one_disconnected_state(d: &Dfa) -> bool {
    let n = d.n();
    let fixed: Vec<State> = (0..n).filter(|&q| (0..d.k()).all(|x| d.succ(x, q) == q)).collect();
    let [s] = fixed[..] else { return false };
    (0..d.k()).all(|x| d.row(x).iter().enumerate().all(|(q, &t)| q == s || t as usize != s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity2() -> Dfa {
        Dfa::new(vec![vec![0, 1], vec![0, 1]]).unwrap()
    }

    #[test]
    fn weak_connectivity_examples() {
        assert!(is_weakly_connected(&Dfa::cerny(4).unwrap()).0);
        let (ok, comps) = is_weakly_connected(&identity2());
        assert!(!ok);
        assert_eq!(comps.labels, vec![0, 1]);
        let (ok, comps) = is_weakly_connected(&Dfa::new(vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap());
        assert!(!ok);
        assert_eq!(comps.count, 3);
        assert!(comps.is_consistent_with(&Dfa::new(vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap()));
    }

    #[test]
    fn closed_component_examples() {
        let c = minimal_closed_components(&Dfa::cerny(4).unwrap());
        assert_eq!(c.components, vec![vec![0, 1, 2, 3]]);
        let sink = Dfa::new(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(minimal_closed_components(&sink).components, vec![vec![0]]);
        assert_eq!(minimal_closed_components(&identity2()).components, vec![vec![0], vec![1]]);
    }

    #[test]
    fn closed_components_skip_transient_states() {
        // 0 → 1 → 2 ⇄ 3 on both letters, with 4 a sink reached from 1 by b.
        let d = Dfa::new(vec![vec![1, 2, 3, 2, 4], vec![1, 4, 3, 2, 4]]).unwrap();
        let c = minimal_closed_components(&d);
        assert_eq!(c.components, vec![vec![2, 3], vec![4]]);
        assert_eq!(c.sizes, vec![2, 1]);
        assert_eq!(c.min_size(), 1);
    }

    #[test]
    fn singleton_probability_values() {
        assert!((disconnected_singleton_probability(3).unwrap() - 1.0 / 27.0).abs() < 1e-15);
        assert!((disconnected_singleton_probability(4).unwrap() - 0.03125).abs() < 1e-15);
        let n = 1_000_000;
        let scaled = n as f64 * disconnected_singleton_probability(n).unwrap();
        assert!((scaled - (-2.0f64).exp()).abs() < 1e-5);
        assert!(disconnected_singleton_probability(2).is_err());
    }

    #[test]
    fn one_disconnected_family() {
        // State 2 isolated with loops; 0 and 1 exchange under a.
        let d = Dfa::new(vec![vec![1, 0, 2], vec![1, 1, 2]]).unwrap();
        assert!(has_exactly_one_disconnected_state(&d));
        assert!(!has_exactly_one_disconnected_state(&Dfa::new(vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap()));
        // A second doubly-fixed state excludes the automaton even when it is entered.
        let d = Dfa::new(vec![vec![0, 0, 2], vec![0, 0, 2]]).unwrap();
        assert!(!has_exactly_one_disconnected_state(&d));
    }
}
