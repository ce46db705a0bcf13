//! Structure and synchronization of random complete automata.
//!
//! The crate is organised bottom-up:
//!
//! - [`automaton`]: the [`Dfa`] table, uniform generation, JSON interchange,
//!   weak connectivity and minimal closed components.
//! - [`funcgraph`]: decomposition of one letter's functional graph into
//!   clusters, cycles, levels and trees.
//! - [`sync`]: exact ground truth via the pair automaton (mergeable, deadlock
//!   and stable pairs), reset words, F-cliques and exhaustive enumeration.
//! - [`fast`]: a budgeted decision pipeline built around the stable pair
//!   obtained from a unique highest tree, with exact fallback.
//! - [`experiments`]: Monte Carlo harness, Wilson intervals and log-log fits.

pub mod automaton;
pub mod error;
pub mod experiments;
pub mod fast;
pub mod funcgraph;
pub mod sync;

pub use automaton::{Dfa, Rng, State, Word};
pub use error::{Error, Result};
pub use sync::{Certificate, Verdict};
