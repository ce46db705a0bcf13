//! Exact ground truth through the pair automaton.
//!
//! A pair `{p, q}` is mergeable if some word sends both states to one state,
//! deadlock otherwise, and stable if every word leaves it mergeable. The
//! automaton is synchronizing iff every pair is mergeable.

mod cliques;
mod enumerate;
mod exact;
mod pairs;
mod verdict;

pub use cliques::{f_cliques, FCliqueSet, MAX_CLIQUE_STATES};
pub use enumerate::{enumerate_all, enumerate_fold, EnumerationSummary, MAX_ENUMERATED};
pub use exact::{decide_exact, greedy_reset_word, shortest_reset_word, MAX_SUBSET_SEARCH_STATES};
pub use pairs::{
    merge_word, ordered, pair_count, pair_from_index, pair_graph_analysis, pair_index, propagate_pairs, MergeTable,
    PairGraphResult, PairSearch, PairSearcher, MAX_PAIR_TABLE_STATES,
};
pub use verdict::{Certificate, Diagnostics, Method, Verdict};
