//! Forward and backward transfer-entropy feature selection.
//!
//! Both procedures are greedy and score whole features (all `L` lags of a
//! feature together), always conditioning on the target's own past.
//!
//! Backward selection starts from every feature and repeatedly drops the one
//! with the smallest conditional transfer entropy given the others, as long as
//! the accumulated loss stays within `delta / (2 B^2)` (regression) or
//! `delta^2 / 2` (classification). Forward selection starts empty and adds the
//! feature with the largest conditional transfer entropy given those already
//! chosen until the accumulated gain reaches `Delta / (2 B^2)` (or
//! `Delta^2 / 2`), the candidates run out, or the best candidate no longer
//! carries more than `epsilon_stop` nats.
//!
//! Because the conditional terms telescope (chain rule of mutual information),
//! the accumulated loss/gain equals the joint transfer entropy of the removed /
//! selected set, which is what ties the thresholds to the error bounds in
//! [`compute_bounds`].

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    transfer_entropy_embedded, union_concentration_bound, ConcentrationParams, EstimatorConfig,
};
use crate::timeseries::{embed, EmbeddedDesign, LagSpec, TimeSeriesDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    #[default]
    Regression,
    Classification,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(Self::Regression),
            "classification" => Ok(Self::Classification),
            other => Err(Error::InvalidConfig(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Self::Forward),
            "backward" => Ok(Self::Backward),
            other => Err(Error::InvalidConfig(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub lags: LagSpec,
    /// Maximum information loss (backward) or minimum information gain (forward).
    pub threshold: f64,
    /// Bound `B` on `|Y|`. Defaults to the largest absolute target value in the data.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub target_bound: Option<f64>,
    #[serde(default)]
    pub task: Task,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    /// Forward selection stops once the best candidate scores at most this much.
    #[serde(default)]
    pub epsilon_stop: f64,
    /// Extended-BIC multiplicity charge: every score is lowered by
    /// `gamma ln(D) / n` for `D` candidate features and `n` embedded samples,
    /// so that the largest of many null scores still falls below zero.
    #[serde(default)]
    pub ebic_gamma: f64,
}

impl SelectionConfig {
    pub fn new(lags: LagSpec, threshold: f64) -> Self {
        Self {
            lags,
            threshold,
            target_bound: None,
            task: Task::Regression,
            estimator: EstimatorConfig::default(),
            epsilon_stop: 0.0,
            ebic_gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        LagSpec::new(self.lags.feature_lags, self.lags.target_lags)?;
        if !(self.threshold >= 0.0) || self.threshold.is_nan() {
            return Err(Error::InvalidConfig("threshold must be >= 0".into()));
        }
        if let Some(b) = self.target_bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidConfig("B must be positive and finite".into()));
            }
        }
        if !(self.epsilon_stop >= 0.0) {
            return Err(Error::InvalidConfig("epsilon_stop must be >= 0".into()));
        }
        if !(self.ebic_gamma >= 0.0 && self.ebic_gamma.is_finite()) {
            return Err(Error::InvalidConfig("ebic_gamma must be finite and >= 0".into()));
        }
        self.estimator.validate()
    }

    /// `B`, falling back to the data when unset.
    pub fn resolve_bound(&self, ds: &TimeSeriesDataset) -> Result<f64> {
        let b = self.target_bound.unwrap_or_else(|| ds.max_abs_target());
        if b > 0.0 && b.is_finite() {
            Ok(b)
        } else {
            Err(Error::InvalidConfig("B resolved to zero: target is identically 0".into()))
        }
    }
}

/// The constant the cumulative transfer entropy is compared against.
pub fn stopping_threshold(task: Task, threshold: f64, target_bound: f64) -> f64 {
    match task {
        Task::Regression => threshold / (2.0 * target_bound * target_bound),
        Task::Classification => threshold * threshold / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ThresholdReached,
    CandidatesExhausted,
    EstimateFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub feature: usize,
    /// Conditional transfer entropy estimate, less any multiplicity charge.
    pub te: f64,
    /// Clamped running total after this step.
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub direction: Direction,
    /// Forward: in order of selection. Backward: the surviving features, ascending.
    pub selected: Vec<usize>,
    /// Backward only: features in order of removal.
    pub removed: Vec<usize>,
    pub steps: Vec<Step>,
    #[serde(rename = "iterations_K")]
    pub iterations_k: usize,
    pub stop_reason: StopReason,
    /// The cumulative-TE stopping constant that was applied.
    pub threshold_used: f64,
    #[serde(rename = "B")]
    pub target_bound: f64,
}

impl SelectionResult {
    pub fn cumulative(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative)
    }
}

/// Source of conditional transfer entropy scores `TE_{X_i -> Y | X_cond}`.
pub trait TeScorer: Sync {
    fn score(&self, candidate: usize, cond: &BTreeSet<usize>) -> Result<f64>;
}

/// Scores from a lag embedding holding every feature, minus a constant charge.
pub struct EmbeddedScorer<'a> {
    pub design: &'a EmbeddedDesign,
    pub estimator: EstimatorConfig,
    pub charge: f64,
}

impl TeScorer for EmbeddedScorer<'_> {
    fn score(&self, candidate: usize, cond: &BTreeSet<usize>) -> Result<f64> {
        let te = transfer_entropy_embedded(self.design, &[candidate].into(), cond, &self.estimator)?;
        Ok(te - self.charge)
    }
}

impl<F> TeScorer for F
where
    F: Fn(usize, &BTreeSet<usize>) -> Result<f64> + Sync,
{
    fn score(&self, candidate: usize, cond: &BTreeSet<usize>) -> Result<f64> {
        self(candidate, cond)
    }
}

fn score_all<S: TeScorer>(
    scorer: &S,
    candidates: &[usize],
    cond_of: impl Fn(usize) -> BTreeSet<usize> + Sync,
) -> Result<Vec<f64>> {
    candidates
        .par_iter()
        .map(|&i| scorer.score(i, &cond_of(i)))
        .collect()
}

/// Backward elimination over `features` with a precomputed stopping constant.
pub fn backward_with<S: TeScorer>(
    scorer: &S,
    features: &[usize],
    stop_at: f64,
    target_bound: f64,
) -> Result<SelectionResult> {
    let mut remaining: Vec<usize> = features.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut removed = Vec::new();
    let mut steps = Vec::new();
    let mut loss = 0.0;

    let stop_reason = loop {
        if remaining.len() <= 1 {
            break StopReason::CandidatesExhausted;
        }
        let set: BTreeSet<usize> = remaining.iter().copied().collect();
        let scores = score_all(scorer, &remaining, |i| {
            let mut c = set.clone();
            c.remove(&i);
            c
        })?;
        // argmin, lowest index on ties (remaining is ascending)
        let (pos, te) = scores
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (p, v)| if v < best.1 { (p, v) } else { best });
        let candidate_loss = loss + te.max(0.0);
        if candidate_loss > stop_at {
            break StopReason::ThresholdReached;
        }
        loss = candidate_loss;
        let feature = remaining.remove(pos);
        removed.push(feature);
        steps.push(Step {
            feature,
            te,
            cumulative: loss,
        });
    };

    Ok(SelectionResult {
        direction: Direction::Backward,
        selected: remaining,
        removed,
        iterations_k: steps.len(),
        steps,
        stop_reason,
        threshold_used: stop_at,
        target_bound,
    })
}

/// Forward selection over `features` with a precomputed stopping constant.
pub fn forward_with<S: TeScorer>(
    scorer: &S,
    features: &[usize],
    stop_at: f64,
    epsilon_stop: f64,
    target_bound: f64,
) -> Result<SelectionResult> {
    let mut candidates: Vec<usize> = features.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    let mut selected: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let mut gain = 0.0;

    let stop_reason = loop {
        if gain >= stop_at {
            break StopReason::ThresholdReached;
        }
        if candidates.is_empty() {
            break StopReason::CandidatesExhausted;
        }
        let cond: BTreeSet<usize> = selected.iter().copied().collect();
        let scores = score_all(scorer, &candidates, |_| cond.clone())?;
        // argmax, lowest index on ties (candidates is ascending)
        let (pos, te) = scores
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (p, v)| if v > best.1 { (p, v) } else { best });
        if te <= epsilon_stop {
            break StopReason::EstimateFloor;
        }
        gain += te.max(0.0);
        let feature = candidates.remove(pos);
        selected.push(feature);
        steps.push(Step {
            feature,
            te,
            cumulative: gain,
        });
    };

    Ok(SelectionResult {
        direction: Direction::Forward,
        selected,
        removed: Vec::new(),
        iterations_k: steps.len(),
        steps,
        stop_reason,
        threshold_used: stop_at,
        target_bound,
    })
}

fn prepare(ds: &TimeSeriesDataset, cfg: &SelectionConfig) -> Result<(EmbeddedDesign, f64, f64)> {
    cfg.validate()?;
    let b = cfg.resolve_bound(ds)?;
    let all: BTreeSet<usize> = (0..ds.n_features()).collect();
    let design = embed(ds, cfg.lags, &all)?;
    Ok((design, b, stopping_threshold(cfg.task, cfg.threshold, b)))
}

fn scorer<'a>(design: &'a EmbeddedDesign, cfg: &SelectionConfig) -> EmbeddedScorer<'a> {
    let d = design.feature_lags.len().max(1) as f64;
    EmbeddedScorer {
        design,
        estimator: cfg.estimator,
        charge: cfg.ebic_gamma * d.ln() / design.n() as f64,
    }
}

/// Backward TEFS on every feature of `ds`. The last remaining feature is never removed.
pub fn backward_tefs(ds: &TimeSeriesDataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let (design, b, stop_at) = prepare(ds, cfg)?;
    let scorer = scorer(&design, cfg);
    let features: Vec<usize> = (0..ds.n_features()).collect();
    backward_with(&scorer, &features, stop_at, b)
}

/// Forward TEFS on every feature of `ds`.
pub fn forward_tefs(ds: &TimeSeriesDataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let (design, b, stop_at) = prepare(ds, cfg)?;
    let scorer = scorer(&design, cfg);
    let features: Vec<usize> = (0..ds.n_features()).collect();
    forward_with(&scorer, &features, stop_at, cfg.epsilon_stop, b)
}

pub fn select(
    ds: &TimeSeriesDataset,
    cfg: &SelectionConfig,
    direction: Direction,
) -> Result<SelectionResult> {
    match direction {
        Direction::Forward => forward_tefs(ds, cfg),
        Direction::Backward => backward_tefs(ds, cfg),
    }
}

/// `TE_{X -> Y}` with every feature as the source.
pub fn total_transfer_entropy(ds: &TimeSeriesDataset, cfg: &SelectionConfig) -> Result<f64> {
    let all: BTreeSet<usize> = (0..ds.n_features()).collect();
    crate::estimators::transfer_entropy(ds, &all, &BTreeSet::new(), cfg.lags, &cfg.estimator)
}

/// Excess error over the irreducible term (`sigma^2` for regression, the Bayes
/// error `epsilon` for classification) guaranteed for the selected set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub direction: Direction,
    pub task: Task,
    /// `delta` or `Delta`.
    pub threshold_used: f64,
    pub excess_term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_te_estimate: Option<f64>,
    /// Symbol of the irreducible error the bound adds `excess_term` to.
    pub irreducible: String,
    /// Human-readable form of the bound.
    pub expression: String,
}

/// Error-bound excess terms for a finished selection.
///
/// Backward: `delta` for both tasks. Forward regression: `2 B^2 TE_{X->Y} - Delta`;
/// forward classification: `sqrt(max(0, 2 TE_{X->Y} - Delta^2))`. Forward bounds
/// need `total_te = TE_{X->Y}` over all features.
pub fn compute_bounds(
    result: &SelectionResult,
    cfg: &SelectionConfig,
    total_te: Option<f64>,
) -> Result<BoundReport> {
    let thr = cfg.threshold;
    let irreducible = match cfg.task {
        Task::Regression => "sigma^2",
        Task::Classification => "epsilon",
    };
    let (excess, total) = match result.direction {
        Direction::Backward => (thr, total_te),
        Direction::Forward => {
            let te = total_te.ok_or(Error::MissingTotalTe)?;
            let b = result.target_bound;
            let excess = match cfg.task {
                Task::Regression => 2.0 * b * b * te - thr,
                Task::Classification => (2.0 * te - thr * thr).max(0.0).sqrt(),
            };
            (excess, Some(te))
        }
    };
    Ok(BoundReport {
        direction: result.direction,
        task: cfg.task,
        threshold_used: thr,
        excess_term: excess,
        total_te_estimate: total,
        irreducible: irreducible.to_owned(),
        expression: format!("{irreducible} + {excess}"),
    })
}

/// Excess term plus the finite-sample estimation slack
/// `2 B^2 K (sqrt(4 C_V^2 / n ln(2^(d+1) / eta)) + C_B n^(-beta / (beta + d)))`
/// with `d = L D + M + 1`. Regression only.
pub fn finite_sample_excess(
    report: &BoundReport,
    result: &SelectionResult,
    lags: LagSpec,
    n_features: usize,
    params: &ConcentrationParams,
) -> Result<f64> {
    if report.task != Task::Regression {
        return Err(Error::InvalidParams(
            "finite-sample slack is only available for regression".into(),
        ));
    }
    let d = lags.feature_lags * n_features + lags.target_lags + 1;
    let slack = union_concentration_bound(&ConcentrationParams { d, ..*params })?;
    let b = result.target_bound;
    Ok(report.excess_term + 2.0 * b * b * result.iterations_k as f64 * slack)
}
