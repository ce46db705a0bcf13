//! Monte Carlo harness.
//!
//! Every trial draws its automaton from a generator seeded only by
//! `(seed, metric, n, trial index)`, and per-`n` results are integer sums,
//! so a report does not depend on the number of workers or on scheduling.

mod stats;

pub use stats::{fit_loglog, wilson_interval, LogLogFit, Z_95};

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{
    has_exactly_one_disconnected_state, is_weakly_connected, minimal_closed_components, mix64, Dfa, Rng,
};
use crate::error::{invalid, Error, Result};
use crate::fast::{BudgetPolicy, FastDecider};
use crate::funcgraph::{cycle_count, high_tree_stats, LetterGraph};
use crate::sync::{decide_exact, enumerate_all};

/// The rare event observed once per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Metric {
    /// The automaton is not synchronizing (decided by the fast pipeline).
    SyncProb,
    /// Letter 0 has more than `5·ln n` cycles.
    CycleTail,
    /// Letter 0 lacks a unique highest tree that beats the rest by 2.
    HighTreeFail,
    /// Some minimal closed component is smaller than `n/(q·e²)`.
    MinClosedSmall,
    /// The vertices of letter 0 above the second-highest tree miss some
    /// minimal closed component.
    HighReachFail,
    /// The fast pipeline had to fall back to the exact decider.
    FastFallback,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::SyncProb,
        Metric::CycleTail,
        Metric::HighTreeFail,
        Metric::MinClosedSmall,
        Metric::HighReachFail,
        Metric::FastFallback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SyncProb => "SYNC_PROB",
            Metric::CycleTail => "CYCLE_TAIL",
            Metric::HighTreeFail => "HIGH_TREE_FAIL",
            Metric::MinClosedSmall => "MIN_CLOSED_SMALL",
            Metric::HighReachFail => "HIGH_REACH_FAIL",
            Metric::FastFallback => "FAST_FALLBACK",
        }
    }

    fn salt(self) -> u64 {
        Metric::ALL.iter().position(|&m| m == self).expect("listed") as u64 + 1
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| invalid(format!("unknown metric {s:?}")))
    }
}

/// Tunables of the individual metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    /// CYCLE_TAIL threshold factor on `ln n`.
    pub cycle_factor: f64,
    /// MIN_CLOSED_SMALL divisor `q` in `n/(q·e²)`.
    pub closed_q: f64,
    /// Budgets for SYNC_PROB and FAST_FALLBACK.
    pub budget: BudgetPolicy,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { cycle_factor: 5.0, closed_q: 2.0, budget: BudgetPolicy::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Independent uniform automata per grid point.
    Random { samples: u64 },
    /// Every automaton once (tiny `n` only).
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub metric: Metric,
    pub n_grid: Vec<usize>,
    pub k: usize,
    pub sampling: Sampling,
    pub seed: u64,
    pub params: MetricParams,
    /// Worker threads; has no effect on the report.
    pub workers: usize,
}

impl ExperimentSpec {
    pub fn new(metric: Metric, n_grid: Vec<usize>, samples: u64, seed: u64) -> Self {
        ExperimentSpec {
            metric,
            n_grid,
            k: 2,
            sampling: Sampling::Random { samples },
            seed,
            params: MetricParams::default(),
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid: empty"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_grid: must be strictly increasing"));
        }
        if self.n_grid[0] == 0 {
            return Err(invalid("n_grid: state counts must be at least 1"));
        }
        if self.k == 0 {
            return Err(invalid("k: alphabet size must be at least 1"));
        }
        if let Sampling::Random { samples: 0 } = self.sampling {
            return Err(invalid("samples: must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers: must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// `n · frequency`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metric: Metric,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    /// Present with at least three rows and no zero frequency.
    pub slope: Option<LogLogFit>,
    /// False when an underlying routine failed; `rows` then holds only the
    /// grid points completed before the failure.
    pub valid: bool,
    pub error: Option<String>,
    /// Elapsed time. Not part of the serialized report, which must be a pure
    /// function of the spec.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,n,trials,successes,freq,wilson_lo,wilson_hi\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.metric.name(),
                r.n,
                r.trials,
                r.successes,
                r.frequency,
                r.wilson_lo,
                r.wilson_hi
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn row(&self, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Seed of trial `index` at grid point `n`.
pub fn trial_seed(seed: u64, metric: Metric, n: usize, index: u64) -> u64 {
    const G: u64 = 0x9E37_79B9_7F4A_7C15;
    let s = mix64(seed.wrapping_add(metric.salt().wrapping_mul(G)));
    let s = mix64(s.wrapping_add((n as u64).wrapping_mul(G)));
    mix64(s.wrapping_add(index.wrapping_add(1).wrapping_mul(G)))
}

/// One Bernoulli observation of `metric` on `d`.
pub fn observe(metric: Metric, d: &Dfa, params: &MetricParams, fast: &mut FastDecider) -> Result<bool> {
    let n = d.n();
    Ok(match metric {
        Metric::SyncProb => !fast.decide(d)?.synchronizing,
        Metric::FastFallback => fast.decide(d)?.diagnostics.fallback,
        Metric::CycleTail => {
            let lg = LetterGraph::from_map(d.row(0), 0);
            cycle_count(&lg) as f64 > params.cycle_factor * (n as f64).ln()
        }
        Metric::HighTreeFail => {
            let s = high_tree_stats(&LetterGraph::from_map(d.row(0), 0));
            !(s.unique_highest && s.margin >= 2)
        }
        Metric::MinClosedSmall => {
            let bound = n as f64 / (params.closed_q * std::f64::consts::E.powi(2));
            (minimal_closed_components(d).min_size() as f64) < bound
        }
        Metric::HighReachFail => {
            let lg = LetterGraph::from_map(d.row(0), 0);
            let h2 = high_tree_stats(&lg).h2;
            let high = |q: usize| lg.level(q) as i64 >= h2 + 1;
            minimal_closed_components(d).components.iter().any(|c| !c.iter().any(|&q| high(q)))
        }
    })
}

fn count_random(spec: &ExperimentSpec, n: usize, samples: u64) -> Result<u64> {
    let policy = spec.params.budget;
    (0..samples)
        .into_par_iter()
        .map_init(
            || FastDecider::new(policy),
            |fast, i| {
                let mut rng = Rng::new(trial_seed(spec.seed, spec.metric, n, i));
                let d = Dfa::random(n, spec.k, &mut rng)?;
                observe(spec.metric, &d, &spec.params, fast).map(u64::from)
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn count_exhaustive(spec: &ExperimentSpec, n: usize) -> Result<(u64, u64)> {
    let mut fast = FastDecider::new(spec.params.budget);
    let mut hits = 0u64;
    let mut failure = None;
    let summary = enumerate_all(n, spec.k, |d| {
        if failure.is_some() {
            return;
        }
        match observe(spec.metric, d, &spec.params, &mut fast) {
            Ok(hit) => hits += u64::from(hit),
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok((summary.automata, hits)),
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| invalid(format!("cannot start {} workers: {e}", spec.workers)))?;
    let mut rows = Vec::with_capacity(spec.n_grid.len());
    let mut error = None;
    for &n in &spec.n_grid {
        let outcome = match spec.sampling {
            Sampling::Random { samples } => pool.install(|| count_random(spec, n, samples)).map(|s| (samples, s)),
            Sampling::Exhaustive => count_exhaustive(spec, n),
        };
        match outcome {
            Ok((trials, successes)) => {
                let (wilson_lo, wilson_hi) = wilson_interval(successes, trials, Z_95)?;
                let frequency = successes as f64 / trials as f64;
                rows.push(ReportRow {
                    n,
                    trials,
                    successes,
                    frequency,
                    wilson_lo,
                    wilson_hi,
                    scaled: n as f64 * frequency,
                });
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    let slope = if rows.len() >= 3 && rows.iter().all(|r| r.successes > 0) {
        fit_loglog(&rows.iter().map(|r| (r.n as f64, r.frequency)).collect::<Vec<_>>()).ok()
    } else {
        None
    };
    Ok(ExperimentReport {
        metric: spec.metric,
        k: spec.k,
        seed: spec.seed,
        rows,
        slope,
        valid: error.is_none(),
        error,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Exact counts over all `n^(k·n)` automata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactTable {
    pub n: usize,
    pub k: usize,
    pub total: u64,
    pub synchronizing: u64,
    pub not_weakly_connected: u64,
    /// The family with one isolated state fixed by every letter and no
    /// other state fixed by every letter.
    pub one_disconnected: u64,
}

impl ExactTable {
    pub fn p_sync(&self) -> f64 {
        self.synchronizing as f64 / self.total as f64
    }
}

pub fn exact_small_n(n: usize, k: usize) -> Result<ExactTable> {
    let mut table = ExactTable { n, k, total: 0, synchronizing: 0, not_weakly_connected: 0, one_disconnected: 0 };
    let mut failure = None;
    let summary = enumerate_all(n, k, |d| match decide_exact(d) {
        Ok(v) => {
            table.synchronizing += u64::from(v.synchronizing);
            table.not_weakly_connected += u64::from(!is_weakly_connected(d).0);
            table.one_disconnected += u64::from(has_exactly_one_disconnected_state(d));
        }
        Err(e) => failure = Some(e),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    table.total = summary.automata;
    Ok(table)
}

/// Which decider [`mean_decide_steps`] measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decider {
    Exact,
    Fast(BudgetPolicy),
}

/// Mean `diagnostics.steps` per grid point, with the fallback count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub n: usize,
    pub trials: u64,
    pub mean_steps: f64,
    pub fallbacks: u64,
}

pub fn mean_decide_steps(decider: Decider, n_grid: &[usize], samples: u64, seed: u64) -> Result<Vec<StepRow>> {
    if samples == 0 {
        return Err(invalid("samples: must be at least 1"));
    }
    n_grid
        .iter()
        .map(|&n| {
            let policy = match decider {
                Decider::Fast(p) => p,
                Decider::Exact => BudgetPolicy::default(),
            };
            let (steps, fallbacks) = (0..samples)
                .into_par_iter()
                .map_init(
                    || FastDecider::new(policy),
                    |fast, i| {
                        let mut rng = Rng::new(trial_seed(seed, Metric::FastFallback, n, i));
                        let d = Dfa::random(n, 2, &mut rng)?;
                        let v = match decider {
                            Decider::Exact => decide_exact(&d)?,
                            Decider::Fast(_) => fast.decide(&d)?,
                        };
                        Ok((v.diagnostics.steps, u64::from(v.diagnostics.fallback)))
                    },
                )
                .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
            Ok(StepRow { n, trials: samples, mean_steps: steps as f64 / samples as f64, fallbacks })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("sync-prob".parse::<Metric>().unwrap(), Metric::SyncProb);
        assert!("nope".parse::<Metric>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = ExperimentSpec::new(Metric::CycleTail, vec![8, 4], 10, 1);
        assert!(s.validate().is_err());
        s.n_grid = vec![4, 8];
        assert!(s.validate().is_ok());
        s.sampling = Sampling::Random { samples: 0 };
        assert!(s.validate().is_err());
    }

    #[test]
    fn exhaustive_sync_prob_n2() {
        let mut s = ExperimentSpec::new(Metric::SyncProb, vec![2], 1, 0);
        s.sampling = Sampling::Exhaustive;
        let r = run_experiment(&s).unwrap();
        assert_eq!((r.rows[0].trials, r.rows[0].successes), (16, 4));
        assert_eq!(r.rows[0].frequency, 0.25);
    }

    #[test]
    fn exact_tables() {
        let t = exact_small_n(2, 2).unwrap();
        assert_eq!((t.total, t.synchronizing), (16, 12));
        let t = exact_small_n(3, 2).unwrap();
        assert_eq!((t.total, t.one_disconnected), (729, 27));
        let t = exact_small_n(1, 2).unwrap();
        assert_eq!(t.p_sync(), 1.0);
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for m in Metric::ALL {
            for n in [4, 5] {
                for i in 0..100 {
                    assert!(seen.insert(trial_seed(7, m, n, i)));
                }
            }
        }
    }

    #[test]
    fn report_independent_of_workers() {
        let mut s = ExperimentSpec::new(Metric::HighTreeFail, vec![16, 32, 64], 300, 5);
        let one = run_experiment(&s).unwrap();
        s.workers = 3;
        let three = run_experiment(&s).unwrap();
        assert_eq!(one.to_csv(), three.to_csv());
        assert_eq!(one.to_json(), three.to_json());
    }

    #[test]
    fn csv_layout() {
        let r = run_experiment(&ExperimentSpec::new(Metric::CycleTail, vec![10], 20, 3)).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("metric,n,trials,successes,freq,wilson_lo,wilson_hi"));
        assert!(lines.next().unwrap().starts_with("CYCLE_TAIL,10,20,"));
    }
}
