//! Scoring selections against ground truth and held-out data, and the
//! synthetic benchmark harness that sweeps one generation parameter at a time.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use ndarray::{concatenate, Array1, Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Backend, EstimatorConfig};
use crate::scm::{
    extend_to_dimension, generate, sample_coefficients, BuiltinGraph, EdgeTemplate,
    GraphTemplate, GroundTruth, Node,
};
use crate::selection::{select, Direction, SelectionConfig, Task};
use crate::timeseries::{embed, standardize, temporal_split, LagSpec, TimeSeriesDataset};

const OLS_RIDGE: f64 = 1e-10;

/// True and false positive rates of per-repetition selections.
///
/// Every (repetition, candidate) pair is counted once. A candidate is a true
/// link when it appears in `truth`; every other candidate is a false link.
pub fn tpr_fpr(
    selected_per_seed: &[BTreeSet<Node>],
    truth: &GroundTruth,
    candidates: &BTreeSet<Node>,
) -> Result<(f64, f64)> {
    if let Some(n) = truth.true_target_links.iter().find(|n| !candidates.contains(n)) {
        return Err(Error::InvalidBenchmark(format!("true link {n} is not a candidate")));
    }
    let n_true = truth.true_target_links.len();
    let n_false = candidates.len() - n_true;
    if n_true == 0 {
        return Err(Error::EmptyDenominator("no true links".into()));
    }
    if n_false == 0 {
        return Err(Error::EmptyDenominator("no false candidates".into()));
    }
    let (mut tp, mut fp) = (0usize, 0usize);
    for sel in selected_per_seed {
        if let Some(n) = sel.iter().find(|n| !candidates.contains(n)) {
            return Err(Error::InvalidBenchmark(format!("selected {n} is not a candidate")));
        }
        for n in sel {
            if truth.true_target_links.contains(n) {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let reps = selected_per_seed.len().max(1) as f64;
    Ok((tp as f64 / (n_true as f64 * reps), fp as f64 / (n_false as f64 * reps)))
}

/// Regressors `[Y lags | selected feature lags]` and the response of one split.
fn ols_design(
    ds: &TimeSeriesDataset,
    selected: &BTreeSet<usize>,
    lags: LagSpec,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let design = embed(ds, lags, selected)?;
    let x = if selected.is_empty() {
        design.target_lags.clone()
    } else {
        let f = design.stack_features(selected);
        concatenate(Axis(1), &[design.target_lags.view(), f.view()]).expect("same row count")
    };
    Ok((x, design.response))
}

fn r2(y: &Array1<f64>, pred: &Array1<f64>) -> f64 {
    let mean = y.mean().expect("nonempty");
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return 0.0;
    }
    let ss_res: f64 = y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

/// Train and test coefficient of determination of an OLS fit (with intercept)
/// of `Y_t` on the target's last `M` values and the selected features' last
/// `L` values. Only `train` is used for fitting; each split's R² uses its own
/// mean as the baseline.
pub fn r2_linear(
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    selected: &BTreeSet<usize>,
    lags: LagSpec,
) -> Result<(f64, f64)> {
    let (x_tr, y_tr) = ols_design(train, selected, lags)?;
    let (x_te, y_te) = ols_design(test, selected, lags)?;
    let y_mean = y_tr.mean().expect("nonempty");
    if y_tr.iter().all(|&v| v == y_mean) {
        return Err(Error::SingularDesign);
    }
    let x_mean = x_tr.mean_axis(Axis(0)).expect("nonempty");
    let xc = &x_tr - &x_mean;
    let yc = &y_tr - y_mean;

    let p = xc.ncols();
    let gram = xc.t().dot(&xc);
    let rhs = xc.t().dot(&yc);
    let a = DMatrix::from_fn(p, p, |i, j| gram[[i, j]] + if i == j { OLS_RIDGE } else { 0.0 });
    let b = DVector::from_fn(p, |i, _| rhs[i]);
    let beta = a.cholesky().ok_or(Error::SingularDesign)?.solve(&b);
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDesign);
    }
    let beta = Array1::from_iter(beta.iter().copied());
    let predict = |x: &Array2<f64>| (x - &x_mean).dot(&beta) + y_mean;
    Ok((r2(&y_tr, &predict(&x_tr)), r2(&y_te, &predict(&x_te))))
}

/// Which graph a benchmark simulates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Builtin(BuiltinGraph),
    /// User topology; edges with a fixed `coef` count as its canonical coefficients.
    Custom(GraphTemplate),
}

impl GraphSource {
    fn default_lag(&self) -> usize {
        match self {
            Self::Builtin(g) => g.default_lag(),
            Self::Custom(t) => t.edges.iter().map(|e| e.lag).max().unwrap_or(1),
        }
    }

    fn default_noise_grid(&self) -> Vec<f64> {
        match self {
            Self::Builtin(BuiltinGraph::Graph3) => vec![0.1, 0.3, 0.5, 0.7, 0.9],
            _ => vec![0.01, 0.05, 0.1, 0.15, 0.2],
        }
    }

    /// Template whose graph edges carry the canonical coefficients.
    fn canonical(&self) -> GraphTemplate {
        match self {
            Self::Builtin(g) => {
                let mut t = g.template();
                for (slot, e) in t.edges.iter_mut().zip(g.canonical_edges()) {
                    slot.coef = Some(e.coef);
                }
                t
            }
            Self::Custom(t) => t.clone(),
        }
    }

    /// Template with every graph coefficient unset, ready for sampling.
    fn uncoefficiented(&self) -> GraphTemplate {
        let mut t = self.canonical();
        for e in &mut t.edges {
            e.coef = None;
        }
        t
    }
}

/// How graph coefficients are chosen for each repetition. Noise-triple
/// coefficients are always drawn from the repetition seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    /// The graph's fixed coefficients.
    Canonical,
    /// One banded draw shared by every repetition.
    Sampled { draw: u64 },
    /// A fresh banded draw per repetition seed.
    PerSeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Noise,
    Lag,
    Samples,
    RandomCoefficients,
    Dimension,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            Self::Noise => "noise",
            Self::Lag => "lag",
            Self::Samples => "samples",
            Self::RandomCoefficients => "random_coefficients",
            Self::Dimension => "dimension",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    /// Defaults to the standard grid of the axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_bench_estimator() -> EstimatorConfig {
    EstimatorConfig::with_backend(Backend::GaussianBic)
}

fn default_gamma() -> f64 {
    1.0
}

fn default_bound() -> Option<f64> {
    Some(1.0)
}

/// Selection settings of a benchmark; lags come from the benchmark itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSelection {
    /// Defaults to 100 for forward and 1e-6 for backward runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// `B`; `null` falls back to the largest absolute training target.
    #[serde(rename = "B", default = "default_bound")]
    pub target_bound: Option<f64>,
    #[serde(default)]
    pub task: Task,
    #[serde(default = "default_bench_estimator")]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub epsilon_stop: f64,
    #[serde(default = "default_gamma")]
    pub ebic_gamma: f64,
}

impl Default for BenchSelection {
    fn default() -> Self {
        Self {
            threshold: None,
            target_bound: default_bound(),
            task: Task::Regression,
            estimator: default_bench_estimator(),
            epsilon_stop: 0.0,
            ebic_gamma: default_gamma(),
        }
    }
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}
fn default_algorithm() -> Direction {
    Direction::Forward
}
fn default_n_samples() -> usize {
    300
}
fn default_noise() -> f64 {
    0.1
}
fn default_coefficients() -> CoefficientMode {
    CoefficientMode::Canonical
}
fn default_true() -> bool {
    true
}
fn default_train_fraction() -> f64 {
    0.7
}

/// A benchmark suite: one graph, a list of repetition seeds, one selection
/// algorithm and at most one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub graph: GraphSource,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_algorithm")]
    pub algorithm: Direction,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_noise")]
    pub noise: f64,
    /// `L = M`; defaults to the graph's benchmark lag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag: Option<usize>,
    #[serde(default = "default_coefficients")]
    pub coefficients: CoefficientMode,
    /// Total variable count (features plus target) after noise-triple extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub selection: BenchSelection,
    /// z-score the training split before selection.
    #[serde(default = "default_true")]
    pub standardize: bool,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

impl BenchmarkConfig {
    pub fn new(graph: BuiltinGraph) -> Self {
        Self {
            graph: GraphSource::Builtin(graph),
            seeds: default_seeds(),
            algorithm: default_algorithm(),
            n_samples: default_n_samples(),
            noise: default_noise(),
            lag: None,
            coefficients: default_coefficients(),
            dimension: None,
            sweep: None,
            selection: BenchSelection::default(),
            standardize: true,
            train_fraction: default_train_fraction(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBenchmark(m));
        if self.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        if self.n_samples < 4 {
            return bad(format!("n_samples = {} is too small", self.n_samples));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise must be finite and >= 0".into());
        }
        if self.lag == Some(0) {
            return bad("lag must be at least 1".into());
        }
        if let Some(t) = self.selection.threshold {
            if !(t >= 0.0) {
                return bad("threshold must be >= 0".into());
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.values.as_ref().is_some_and(|v| v.is_empty()) {
                return bad("sweep has no values".into());
            }
        }
        if let GraphSource::Custom(t) = &self.graph {
            if self.coefficients == CoefficientMode::Canonical
                && t.edges.iter().any(|e| e.coef.is_none())
            {
                return bad("canonical coefficients need every template edge to carry `coef`".into());
            }
        }
        self.selection.estimator.validate()
    }

    fn threshold(&self) -> f64 {
        self.selection.threshold.unwrap_or(match self.algorithm {
            Direction::Forward => 100.0,
            Direction::Backward => 1e-6,
        })
    }

    /// `(axis, value)` per sweep point; a single unlabelled point without a sweep.
    pub fn sweep_points(&self) -> Vec<Option<(SweepAxis, f64)>> {
        let Some(sw) = &self.sweep else {
            return vec![None];
        };
        let values = sw.values.clone().unwrap_or_else(|| match sw.axis {
            SweepAxis::Noise => self.graph.default_noise_grid(),
            SweepAxis::Lag => vec![2.0, 3.0, 4.0, 5.0],
            SweepAxis::Samples => vec![100.0, 200.0, 300.0, 400.0, 500.0],
            SweepAxis::RandomCoefficients => vec![0.0, 1.0, 2.0, 3.0, 4.0],
            SweepAxis::Dimension => vec![15.0, 20.0, 40.0, 60.0, 80.0, 100.0],
        });
        values.into_iter().map(|v| Some((sw.axis, v))).collect()
    }
}

/// Concrete generation parameters of one sweep point.
#[derive(Debug, Clone, Copy)]
struct Point {
    noise: f64,
    lag: usize,
    n: usize,
    coefficients: CoefficientMode,
    dimension: Option<usize>,
}

fn as_count(axis: SweepAxis, v: f64, min: usize) -> Result<usize> {
    if v.fract() != 0.0 || v < min as f64 {
        return Err(Error::InvalidBenchmark(format!(
            "{} value {v} must be an integer >= {min}",
            axis.name()
        )));
    }
    Ok(v as usize)
}

impl Point {
    fn resolve(cfg: &BenchmarkConfig, sweep: Option<(SweepAxis, f64)>) -> Result<Self> {
        let mut p = Self {
            noise: cfg.noise,
            lag: cfg.lag.unwrap_or_else(|| cfg.graph.default_lag()),
            n: cfg.n_samples,
            coefficients: cfg.coefficients,
            dimension: cfg.dimension,
        };
        if let Some((axis, v)) = sweep {
            match axis {
                SweepAxis::Noise if v >= 0.0 && v.is_finite() => p.noise = v,
                SweepAxis::Noise => {
                    return Err(Error::InvalidBenchmark(format!("noise value {v} is invalid")))
                }
                SweepAxis::Lag => p.lag = as_count(axis, v, 1)?,
                SweepAxis::Samples => p.n = as_count(axis, v, 4)?,
                SweepAxis::RandomCoefficients => {
                    p.coefficients = CoefficientMode::Sampled { draw: as_count(axis, v, 0)? as u64 }
                }
                SweepAxis::Dimension => p.dimension = Some(as_count(axis, v, 1)?),
            }
        }
        Ok(p)
    }
}

/// Independent seed streams derived from one repetition seed.
fn stream(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
}

/// Outcome of one (sweep point, seed) job.
#[derive(Debug, Clone)]
struct Run {
    selected: Vec<usize>,
    truth: GroundTruth,
    n_features: usize,
    r2_train: f64,
    r2_test: f64,
}

fn run_one(cfg: &BenchmarkConfig, p: &Point, seed: u64) -> Result<Run> {
    let base = match p.coefficients {
        CoefficientMode::Canonical => cfg.graph.canonical(),
        _ => cfg.graph.uncoefficiented(),
    };
    let tpl = match p.dimension {
        Some(d) => extend_to_dimension(&base, d, stream(seed, 1))?,
        None => base,
    };
    let coef_seed = match p.coefficients {
        CoefficientMode::Sampled { draw } => stream(draw, 2),
        _ => stream(seed, 2),
    };
    let edges = sample_coefficients(&tpl.edges, coef_seed);
    let spec = tpl.into_spec(edges, p.noise, p.n, seed);
    let (ds, truth) = generate(&spec)?;

    let (train, test) = temporal_split(&ds, cfg.train_fraction)?;
    let lags = LagSpec::new(p.lag, p.lag)?;
    let fit_data = if cfg.standardize { standardize(&train)? } else { train.clone() };
    let sel_cfg = SelectionConfig {
        lags,
        threshold: cfg.threshold(),
        target_bound: cfg.selection.target_bound,
        task: cfg.selection.task,
        estimator: cfg.selection.estimator,
        epsilon_stop: cfg.selection.epsilon_stop,
        ebic_gamma: cfg.selection.ebic_gamma,
    };
    let result = select(&fit_data, &sel_cfg, cfg.algorithm)?;
    let chosen: BTreeSet<usize> = result.selected.iter().copied().collect();
    let (r2_train, r2_test) = r2_linear(&train, &test, &chosen, lags)?;
    Ok(Run {
        selected: result.selected,
        truth,
        n_features: ds.n_features(),
        r2_train,
        r2_test,
    })
}

/// Aggregate of one sweep point over all repetition seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub tpr: f64,
    pub fpr: f64,
    /// Selected feature indices per seed, in selection order.
    pub per_seed_selected: Vec<Vec<usize>>,
    pub true_features: Vec<usize>,
    /// Means over seeds.
    pub r2_train: f64,
    pub r2_test: f64,
}

fn aggregate(point: Option<(SweepAxis, f64)>, runs: Vec<Run>) -> Result<EvalReport> {
    let truth = runs[0].truth.clone();
    let n_features = runs[0].n_features;
    let mut candidates: BTreeSet<Node> = (0..n_features).map(Node::Feature).collect();
    candidates.insert(Node::Target);
    // the target's own past is always conditioned on, so its link is always kept
    let sets: Vec<BTreeSet<Node>> = runs
        .iter()
        .map(|r| {
            let mut s: BTreeSet<Node> = r.selected.iter().map(|&i| Node::Feature(i)).collect();
            s.insert(Node::Target);
            s
        })
        .collect();
    let (tpr, fpr) = tpr_fpr(&sets, &truth, &candidates)?;
    let n = runs.len() as f64;
    Ok(EvalReport {
        label: match point {
            Some((axis, v)) => format!("{}={v}", axis.name()),
            None => "benchmark".into(),
        },
        axis: point.map(|(a, _)| a),
        value: point.map(|(_, v)| v),
        tpr,
        fpr,
        true_features: truth.true_features().into_iter().collect(),
        r2_train: runs.iter().map(|r| r.r2_train).sum::<f64>() / n,
        r2_test: runs.iter().map(|r| r.r2_test).sum::<f64>() / n,
        per_seed_selected: runs.into_iter().map(|r| r.selected).collect(),
    })
}

/// Generate, select and score every (sweep point, seed) pair, in parallel over
/// the current rayon pool. Reports come back in sweep order and are identical
/// across runs and thread counts.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<Vec<EvalReport>> {
    cfg.validate()?;
    let points = cfg
        .sweep_points()
        .into_iter()
        .map(|sw| Point::resolve(cfg, sw).map(|p| (sw, p)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let runs: Vec<Run> = jobs
        .par_iter()
        .map(|&(i, seed)| run_one(cfg, &points[i].1, seed))
        .collect::<Result<_>>()?;

    let per_point = cfg.seeds.len();
    let mut runs = runs.into_iter();
    points
        .iter()
        .map(|(sw, _)| aggregate(*sw, runs.by_ref().take(per_point).collect()))
        .collect()
}

/// `run_benchmark` on a dedicated pool of `threads` workers.
pub fn run_benchmark_with_threads(cfg: &BenchmarkConfig, threads: usize) -> Result<Vec<EvalReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidBenchmark(format!("cannot start thread pool: {e}")))?;
    pool.install(|| run_benchmark(cfg))
}

/// Write `report.json` and `report.csv` into `dir`, creating it if needed.
pub fn write_reports(reports: &[EvalReport], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json_path = dir.join("report.json");
    let mut f = std::fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
    serde_json::to_writer_pretty(&mut f, reports)?;
    writeln!(f).map_err(|e| Error::io(&json_path, e))?;

    let csv_path = dir.join("report.csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["label", "axis", "value", "tpr", "fpr", "r2_train", "r2_test"])?;
    for r in reports {
        w.write_record([
            r.label.clone(),
            r.axis.map_or(String::new(), |a| a.name().to_owned()),
            r.value.map_or(String::new(), |v| v.to_string()),
            r.tpr.to_string(),
            r.fpr.to_string(),
            r.r2_train.to_string(),
            r.r2_test.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok(())
}

/// Custom edge list helper: every edge with its coefficient fixed.
pub fn fixed_template(n_features: usize, edges: &[crate::scm::Edge]) -> GraphTemplate {
    GraphTemplate {
        n_features,
        edges: edges
            .iter()
            .map(|e| EdgeTemplate {
                source: e.source,
                dest: e.dest,
                lag: e.lag,
                coef: Some(e.coef),
            })
            .collect(),
        drivers: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::Node::{Feature as F, Target as Y};

    fn truth(links: &[Node]) -> GroundTruth {
        GroundTruth {
            true_target_links: links.iter().copied().collect(),
        }
    }

    fn cands() -> BTreeSet<Node> {
        [F(0), F(1), Y].into_iter().collect()
    }

    #[test]
    fn perfect_selection() {
        let t = truth(&[F(1), Y]);
        let sel: Vec<BTreeSet<Node>> = (0..10).map(|_| [F(1), Y].into_iter().collect()).collect();
        assert_eq!(tpr_fpr(&sel, &t, &cands()).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn one_false_link_in_ten() {
        let t = truth(&[F(1), Y]);
        let mut sel: Vec<BTreeSet<Node>> = (0..10).map(|_| [F(1), Y].into_iter().collect()).collect();
        sel[3].insert(F(0));
        let (tpr, fpr) = tpr_fpr(&sel, &t, &cands()).unwrap();
        assert_eq!(tpr, 1.0);
        assert!((fpr - 0.1).abs() < 1e-15);
    }

    #[test]
    fn empty_selections_and_denominators() {
        let t = truth(&[F(1), Y]);
        let sel = vec![BTreeSet::new(); 10];
        assert_eq!(tpr_fpr(&sel, &t, &cands()).unwrap(), (0.0, 0.0));
        let all = truth(&[F(0), F(1), Y]);
        assert!(matches!(tpr_fpr(&sel, &all, &cands()), Err(Error::EmptyDenominator(_))));
        assert!(matches!(tpr_fpr(&sel, &truth(&[]), &cands()), Err(Error::EmptyDenominator(_))));
    }

    #[test]
    fn selection_outside_candidates_is_rejected() {
        let t = truth(&[F(1)]);
        let sel = vec![[F(7)].into_iter().collect()];
        assert!(tpr_fpr(&sel, &t, &cands()).is_err());
    }

    fn noiseless(t: usize) -> TimeSeriesDataset {
        let x: Vec<f64> = (0..t).map(|i| ((i * 37 % 101) as f64 / 50.0 - 1.0).sin()).collect();
        let mut y = vec![0.0; t];
        for i in 1..t {
            y[i] = 0.9 * x[i - 1] + 0.1 * y[i - 1];
        }
        TimeSeriesDataset::from_columns(&[x], y).unwrap()
    }

    #[test]
    fn exact_linear_model_is_recovered() {
        let ds = noiseless(200);
        let (train, test) = temporal_split(&ds, 0.7).unwrap();
        let lags = LagSpec::new(1, 1).unwrap();
        let (tr, te) = r2_linear(&train, &test, &[0].into(), lags).unwrap();
        assert!((tr - 1.0).abs() < 1e-8 && (te - 1.0).abs() < 1e-8, "{tr} {te}");
    }

    #[test]
    fn constant_targets() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ds = TimeSeriesDataset::from_columns(std::slice::from_ref(&x), vec![1.0; 20]).unwrap();
        let lags = LagSpec::new(1, 1).unwrap();
        assert!(matches!(
            r2_linear(&ds, &ds, &BTreeSet::new(), lags),
            Err(Error::SingularDesign)
        ));
        let y: Vec<f64> = (0..20).map(|i| (i % 3) as f64).collect();
        let train = TimeSeriesDataset::from_columns(std::slice::from_ref(&x), y).unwrap();
        let test = TimeSeriesDataset::from_columns(&[x], vec![2.0; 20]).unwrap();
        assert_eq!(r2_linear(&train, &test, &[0].into(), lags).unwrap().1, 0.0);
    }

    #[test]
    fn config_defaults_from_minimal_json() {
        let cfg: BenchmarkConfig = serde_json::from_str(r#"{"graph": "graph3"}"#).unwrap();
        assert_eq!(cfg, BenchmarkConfig::new(BuiltinGraph::Graph3));
        assert_eq!(cfg.selection.estimator.backend, Backend::GaussianBic);
        assert_eq!(cfg.threshold(), 100.0);
        let back: BenchmarkConfig = serde_json::from_str(
            r#"{"graph": "graph10", "algorithm": "backward", "coefficients": {"sampled": {"draw": 3}},
                "sweep": {"axis": "dimension"}}"#,
        )
        .unwrap();
        assert_eq!(back.threshold(), 1e-6);
        assert_eq!(back.coefficients, CoefficientMode::Sampled { draw: 3 });
        assert_eq!(back.sweep_points().len(), 6);
        let rt: BenchmarkConfig = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(rt, back);
    }

    #[test]
    fn custom_template_config() {
        let tpl = fixed_template(
            1,
            &[
                crate::scm::Edge { source: F(0), dest: Y, lag: 1, coef: 0.8 },
                crate::scm::Edge { source: Y, dest: Y, lag: 1, coef: 0.3 },
            ],
        );
        let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph3);
        cfg.graph = GraphSource::Custom(tpl);
        cfg.seeds = vec![0, 1];
        let json = serde_json::to_string(&cfg).unwrap();
        let back: BenchmarkConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        // the candidate universe {X0, Y} has no false link
        assert!(matches!(run_benchmark(&cfg), Err(Error::EmptyDenominator(_))));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph3);
        cfg.seeds.clear();
        assert!(matches!(cfg.validate(), Err(Error::InvalidBenchmark(_))));
        let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph3);
        cfg.sweep = Some(Sweep { axis: SweepAxis::Lag, values: Some(vec![1.5]) });
        assert!(matches!(run_benchmark(&cfg), Err(Error::InvalidBenchmark(_))));
    }

    #[test]
    fn single_seed_bookkeeping() {
        let mut cfg = BenchmarkConfig::new(BuiltinGraph::Graph3);
        cfg.seeds = vec![4];
        cfg.sweep = Some(Sweep { axis: SweepAxis::Noise, values: Some(vec![0.1, 0.3]) });
        let reps = run_benchmark(&cfg).unwrap();
        assert_eq!(reps.len(), 2);
        for r in &reps {
            assert_eq!(r.per_seed_selected.len(), 1);
            assert!(r.r2_test <= 1.0);
        }
        assert_eq!(reps[1].label, "noise=0.3");
    }
}
