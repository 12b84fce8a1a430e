mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use tefs::evaluation::{
    r2_linear, run_benchmark, run_benchmark_with_threads, tpr_fpr, write_reports,
    BenchmarkConfig, Sweep, SweepAxis,
};
use tefs::scm::{BuiltinGraph, GroundTruth, Node};
use tefs::timeseries::{load_csv, temporal_split, LagSpec, TimeSeriesDataset};

fn noise_series(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| normal(&mut r)).collect()
}

#[test]
fn autoregression_on_pure_noise_has_no_skill() {
    let lags = LagSpec::new(2, 2).unwrap();
    let scores: Vec<f64> = (0..10)
        .map(|seed| {
            let ds = TimeSeriesDataset::from_columns(
                &[noise_series(300, 100 + seed)],
                noise_series(300, seed),
            )
            .unwrap();
            let (train, test) = temporal_split(&ds, 0.7).unwrap();
            r2_linear(&train, &test, &BTreeSet::new(), lags).unwrap().1
        })
        .collect();
    assert!(mean(&scores) <= 0.05, "{}", mean(&scores));
}

#[test]
fn more_regressors_never_fit_worse_in_sample() {
    let lags = LagSpec::new(2, 2).unwrap();
    for seed in 0..5 {
        let x = noise_series(200, seed);
        let y: Vec<f64> = (0..200)
            .map(|t| if t > 0 { 0.4 * x[t - 1] } else { 0.0 } + 0.5 * noise_series(200, 50 + seed)[t])
            .collect();
        let ds = TimeSeriesDataset::from_columns(&[x, noise_series(200, 99)], y).unwrap();
        let (train, test) = temporal_split(&ds, 0.7).unwrap();
        let base = r2_linear(&train, &test, &BTreeSet::new(), lags).unwrap().0;
        let one = r2_linear(&train, &test, &[0].into(), lags).unwrap().0;
        let both = r2_linear(&train, &test, &[0, 1].into(), lags).unwrap().0;
        assert!(one >= base - 1e-12 && both >= one - 1e-12);
    }
}

fn links() -> impl Strategy<Value = (Vec<BTreeSet<Node>>, BTreeSet<Node>)> {
    let node = prop_oneof![(0usize..6).prop_map(Node::Feature), Just(Node::Target)];
    (
        prop::collection::vec(prop::collection::btree_set(node.clone(), 0..5), 1..8),
        prop::collection::btree_set(node, 1..4),
    )
}

proptest! {
    #[test]
    fn tpr_fpr_ignores_seed_order((sels, truth) in links()) {
        let mut cands: BTreeSet<Node> = (0..6).map(Node::Feature).collect();
        cands.insert(Node::Target);
        let t = GroundTruth { true_target_links: truth };
        let a = tpr_fpr(&sels, &t, &cands).unwrap();
        let mut rev = sels.clone();
        rev.reverse();
        let b = tpr_fpr(&rev, &t, &cands).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!((0.0..=1.0).contains(&a.0) && (0.0..=1.0).contains(&a.1));
    }
}

#[test]
fn benchmark_is_bit_reproducible_across_thread_counts() {
    let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph5);
    cfg.seeds = vec![0, 1, 2, 3];
    cfg.sweep = Some(Sweep { axis: SweepAxis::Samples, values: Some(vec![150.0, 300.0]) });
    let a = run_benchmark_with_threads(&cfg, 1).unwrap();
    let b = run_benchmark_with_threads(&cfg, 4).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn dimension_sweep_keeps_truth() {
    let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph10);
    cfg.seeds = vec![0, 1];
    cfg.sweep = Some(Sweep { axis: SweepAxis::Dimension, values: Some(vec![15.0, 21.0]) });
    let reps = run_benchmark(&cfg).unwrap();
    for r in &reps {
        assert_eq!(r.true_features, vec![2, 5]);
    }
}

#[test]
fn reports_are_written_as_json_and_csv() {
    let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph3);
    cfg.seeds = vec![0, 1];
    cfg.sweep = Some(Sweep { axis: SweepAxis::Noise, values: None });
    let reps = run_benchmark(&cfg).unwrap();
    assert_eq!(reps.len(), 5);
    let dir = tempfile::tempdir().unwrap();
    write_reports(&reps, dir.path()).unwrap();
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back: Vec<tefs::EvalReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, reps);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("label,axis,value,tpr,fpr,r2_train,r2_test"));
}

#[test]
fn csv_round_trip() {
    let ds = TimeSeriesDataset::from_columns(
        &[noise_series(40, 1), noise_series(40, 2)],
        noise_series(40, 3),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    ds.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let back = load_csv(&path, "Y").unwrap();
    assert_eq!(back, ds);
}
