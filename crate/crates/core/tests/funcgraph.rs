mod common;

use proptest::prelude::*;
use synchro_core::funcgraph::{
    analyze_letter, cluster_partition, cycle_count, floor_power, high_tree_stats, LetterGraph,
    DEFAULT_THRESHOLD_EXPONENT,
};
use synchro_core::sync::enumerate_all;
use synchro_core::{Dfa, Rng};

use common::{dfa, relabel, seeded_dfa};

#[test]
fn mean_cyclic_count_matches_random_mapping_asymptotics() {
    let n = 1000;
    let samples = 100_000;
    let mut rng = Rng::new(42);
    let mut map = vec![0u32; n];
    let mut total = 0usize;
    for _ in 0..samples {
        for s in map.iter_mut() {
            *s = rng.below(n as u64) as u32;
        }
        total += LetterGraph::from_map(&map, 0).cyclic_count();
    }
    let mean = total as f64 / samples as f64;
    let expected = (std::f64::consts::PI * n as f64 / 2.0).sqrt();
    assert!((mean / expected - 1.0).abs() <= 0.03, "mean {mean} vs {expected}");
}

#[test]
fn eventual_cycle_vertex_is_the_n_fold_successor() {
    for n in 1..=8 {
        let word = vec![0; n];
        enumerate_all(n, 1, |d| {
            let lg = LetterGraph::from_map(d.row(0), 0);
            for q in 0..n {
                assert_eq!(lg.eventual_cycle_vertex(q, n).unwrap(), d.apply_word(q, &word).unwrap());
            }
        })
        .unwrap();
    }
}

#[test]
fn eventual_cycle_vertex_rejects_short_horizons() {
    let lg = LetterGraph::from_map(&[1, 2, 2], 0);
    assert!(lg.eventual_cycle_vertex(0, 1).is_err());
    assert_eq!(lg.eventual_cycle_vertex(0, 2).unwrap(), 2);
}

proptest! {
    #[test]
    fn levels_decrease_along_arcs(d in dfa(30, 2), x in 0..2usize) {
        let lg = analyze_letter(&d, x).unwrap();
        for q in 0..d.n() {
            let s = lg.succ(q);
            prop_assert_eq!(s, d.succ(x, q));
            if lg.level(q) > 0 {
                prop_assert!(!lg.is_cyclic(q));
                prop_assert_eq!(lg.level(s), lg.level(q) - 1);
                prop_assert_eq!(lg.root(s), lg.root(q));
            } else {
                prop_assert!(lg.is_cyclic(q) && lg.is_cyclic(s));
                prop_assert_eq!(lg.root(q), q);
            }
            prop_assert_eq!(lg.cluster_of(s), lg.cluster_of(q));
        }
    }

    #[test]
    fn cycle_lengths_sum_to_cyclic_count(d in seeded_dfa(1..=500, 1)) {
        let lg = analyze_letter(&d, 0).unwrap();
        let total: usize = lg.clusters().iter().map(|c| c.cycle_length()).sum();
        prop_assert_eq!(total, lg.cyclic_count());
        prop_assert_eq!(lg.clusters().iter().map(|c| c.size).sum::<usize>(), d.n());
        prop_assert_eq!(cycle_count(&lg), lg.clusters().len());
        for c in lg.clusters() {
            for &r in &c.cycle {
                prop_assert_eq!(lg.succ(lg.cycle_predecessor(r)), r);
            }
        }
    }

    #[test]
    fn high_tree_stats_ignore_state_names(d in dfa(25, 1), keys in prop::collection::vec(any::<u64>(), 25)) {
        let mut perm: Vec<usize> = (0..d.n()).collect();
        perm.sort_by_key(|&q| keys[q]);
        let e = relabel(&d, &perm);
        let a = high_tree_stats(&analyze_letter(&d, 0).unwrap());
        let b = high_tree_stats(&analyze_letter(&e, 0).unwrap());
        prop_assert_eq!(a, b);
        prop_assert!(a.h1 >= a.h2);
        prop_assert_eq!(a.margin, a.h1 - a.h2);
    }

    #[test]
    fn partition_is_exact(d in seeded_dfa(1..=3000, 1)) {
        let lg = analyze_letter(&d, 0).unwrap();
        let part = cluster_partition(&lg, DEFAULT_THRESHOLD_EXPONENT).unwrap();
        prop_assert_eq!(part.threshold, floor_power(d.n(), DEFAULT_THRESHOLD_EXPONENT));
        let mut small = 0;
        for (i, c) in lg.clusters().iter().enumerate() {
            prop_assert_eq!(part.big_clusters.contains(&i), c.size > part.threshold);
            if c.size <= part.threshold {
                small += c.size;
            }
        }
        prop_assert_eq!(part.small_count, small);
        prop_assert_eq!(part.small_states.len(), small);
        prop_assert!(part.small_states.iter().all(|&q| lg.clusters()[lg.cluster_of(q)].size <= part.threshold));
    }

    #[test]
    fn floor_power_brackets_the_root(n in 1usize..1_000_000, theta in 0.05f64..0.95) {
        let t = floor_power(n, theta) as f64;
        let exact = (n as f64).powf(theta);
        prop_assert!(t <= exact + 1e-9 && exact < t + 1.0 + 1e-9);
    }
}

#[test]
fn single_tree_convention() {
    let d = Dfa::new(vec![vec![1, 2, 2]]).unwrap();
    let s = high_tree_stats(&analyze_letter(&d, 0).unwrap());
    assert_eq!((s.h1, s.h2, s.unique_highest, s.margin, s.n1, s.n2), (2, -1, true, 3, 1, 2));
}
