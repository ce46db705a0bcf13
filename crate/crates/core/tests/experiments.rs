use proptest::prelude::*;
use synchro_core::experiments::{exact_small_n, run_experiment, wilson_interval, ExperimentSpec, Metric, Sampling, Z_95};

#[test]
fn high_vertices_reach_every_closed_component() {
    let report = run_experiment(&ExperimentSpec::new(Metric::HighReachFail, vec![1000], 10_000, 7)).unwrap();
    let row = report.row(1000).unwrap();
    assert!(row.frequency <= 0.05, "{row:?}");
}

#[test]
fn exhaustive_sampling_matches_the_exact_table() {
    let mut spec = ExperimentSpec::new(Metric::SyncProb, vec![2, 3], 1, 0);
    spec.sampling = Sampling::Exhaustive;
    let report = run_experiment(&spec).unwrap();
    for n in [2, 3] {
        let table = exact_small_n(n, 2).unwrap();
        let row = report.row(n).unwrap();
        assert_eq!(row.trials, table.total);
        assert_eq!(row.successes, table.total - table.synchronizing);
    }
    assert_eq!(report.row(2).unwrap().successes, 4);
}

#[test]
fn worker_count_does_not_change_reports() {
    for metric in Metric::ALL {
        let mut spec = ExperimentSpec::new(metric, vec![16, 32, 64], 300, 99);
        let one = run_experiment(&spec).unwrap();
        spec.workers = 3;
        let three = run_experiment(&spec).unwrap();
        assert_eq!(one.to_json(), three.to_json());
        assert_eq!(one.to_csv(), three.to_csv());
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        ExperimentSpec::new(Metric::SyncProb, vec![], 10, 0),
        ExperimentSpec::new(Metric::SyncProb, vec![8, 8], 10, 0),
        ExperimentSpec::new(Metric::SyncProb, vec![8], 0, 0),
    ];
    for spec in bad {
        assert!(run_experiment(&spec).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_rows_are_consistent(metric in prop::sample::select(Metric::ALL.to_vec()), seed in any::<u64>(), samples in 1u64..80) {
        let report = run_experiment(&ExperimentSpec::new(metric, vec![4, 9, 20], samples, seed)).unwrap();
        prop_assert!(report.valid);
        for row in &report.rows {
            prop_assert_eq!(row.trials, samples);
            prop_assert!(row.successes <= row.trials);
            prop_assert!(row.wilson_lo <= row.frequency && row.frequency <= row.wilson_hi);
            prop_assert!(0.0 <= row.wilson_lo && row.wilson_hi <= 1.0);
        }
        let again = run_experiment(&ExperimentSpec::new(metric, vec![4, 9, 20], samples, seed)).unwrap();
        prop_assert_eq!(report.to_json(), again.to_json());
    }
}

proptest! {
    #[test]
    fn wilson_contains_the_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let successes = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(successes, trials, Z_95).unwrap();
        let p = successes as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}
