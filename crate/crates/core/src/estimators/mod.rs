//! Conditional mutual information and transfer entropy estimation.
//!
//! Four interchangeable backends sit behind [`cmi`]:
//!
//! - [`Backend::DiscretePlugin`]: exact plug-in estimate on integer symbols.
//! - [`Backend::GaussianClosedForm`]: log-determinant formula for jointly Gaussian data.
//! - [`Backend::GaussianBic`]: the same formula minus a Schwarz penalty, so that
//!   conditionally independent sources score below zero.
//! - [`Backend::KnnKsg`]: Frenzel-Pompe conditional KSG estimator (max norm, digamma form).
//!
//! [`transfer_entropy`] lag-embeds a dataset and evaluates
//! `I(Y_t ; X_A^{t-1..t-L} | Y_{t-1..t-M}, X_C^{t-1..t-L})`.

pub mod discrete;
pub mod gaussian;
pub mod kdtree;
pub mod ksg;

use std::collections::BTreeSet;

use ndarray::{concatenate, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{embed, EmbeddedDesign, LagSpec, TimeSeriesDataset};

/// Smallest sample count any backend accepts.
pub const MIN_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    #[serde(rename = "discrete", alias = "DiscretePlugin")]
    DiscretePlugin,
    #[serde(rename = "gaussian", alias = "GaussianClosedForm")]
    GaussianClosedForm,
    #[serde(rename = "gaussian-bic", alias = "GaussianBic")]
    GaussianBic,
    #[serde(rename = "ksg", alias = "KnnKsg")]
    KnnKsg,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" | "DiscretePlugin" => Ok(Backend::DiscretePlugin),
            "gaussian" | "GaussianClosedForm" => Ok(Backend::GaussianClosedForm),
            "gaussian-bic" | "GaussianBic" => Ok(Backend::GaussianBic),
            "ksg" | "KnnKsg" => Ok(Backend::KnnKsg),
            other => Err(Error::InvalidConfig(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub backend: Backend,
    /// KSG neighbour count.
    pub k: usize,
    /// Standard deviation of the seeded jitter added before KSG neighbour search.
    pub noise_tiebreak: f64,
    pub rng_seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            backend: Backend::KnnKsg,
            k: 5,
            noise_tiebreak: 1e-10,
            rng_seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.noise_tiebreak >= 0.0) || !self.noise_tiebreak.is_finite() {
            return Err(Error::InvalidConfig("noise_tiebreak must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Estimate `I(X;Y|Z)` in nats. Rows are samples; `z` may have zero columns.
///
/// The KSG and penalised Gaussian backends may return negative values; they are
/// not clamped.
pub fn cmi(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    z: ArrayView2<f64>,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    cfg.validate()?;
    let n = x.nrows();
    if y.nrows() != n || z.nrows() != n {
        return Err(Error::RowCountMismatch(format!(
            "x has {n} rows, y has {}, z has {}",
            y.nrows(),
            z.nrows()
        )));
    }
    if x.ncols() == 0 || y.ncols() == 0 {
        return Err(Error::InvalidConfig("x and y need at least one column".into()));
    }
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    match cfg.backend {
        Backend::DiscretePlugin => discrete::cmi(x, y, z),
        Backend::GaussianClosedForm => gaussian::cmi(x, y, z),
        Backend::GaussianBic => gaussian::cmi_penalized(x, y, z),
        Backend::KnnKsg => {
            if cfg.k >= n {
                return Err(Error::TooFewSamples {
                    needed: cfg.k + 1,
                    got: n,
                });
            }
            Ok(ksg::cmi(x, y, z, cfg.k, cfg.noise_tiebreak, cfg.rng_seed))
        }
    }
}

/// Conditional transfer entropy on an existing embedding.
///
/// `design` must contain lag blocks for every index in `source` and `cond`.
pub fn transfer_entropy_embedded(
    design: &EmbeddedDesign,
    source: &BTreeSet<usize>,
    cond: &BTreeSet<usize>,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    if let Some(&i) = source.intersection(cond).next() {
        return Err(Error::OverlappingSets(i));
    }
    let x = design.stack_features(source);
    let y = design
        .response
        .view()
        .insert_axis(Axis(1))
        .to_owned();
    let z: Array2<f64> = if cond.is_empty() {
        design.target_lags.clone()
    } else {
        let c = design.stack_features(cond);
        concatenate(Axis(1), &[design.target_lags.view(), c.view()]).expect("same row count")
    };
    cmi(x.view(), y.view(), z.view(), cfg)
}

/// `TE_{X_source -> Y | X_cond}`: the information the source features' last `L`
/// values carry about `Y_t` beyond `Y`'s own last `M` values and the
/// conditioning features' last `L` values.
pub fn transfer_entropy(
    ds: &TimeSeriesDataset,
    source: &BTreeSet<usize>,
    cond: &BTreeSet<usize>,
    lags: LagSpec,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    if let Some(&i) = source.intersection(cond).next() {
        return Err(Error::OverlappingSets(i));
    }
    let all: BTreeSet<usize> = source.union(cond).copied().collect();
    let design = embed(ds, lags, &all)?;
    transfer_entropy_embedded(&design, source, cond, cfg)
}

/// Parameters of the exponential concentration inequality for a density-plug-in
/// CMI estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationParams {
    /// Sample count.
    pub n: usize,
    /// The bound holds with probability at least `1 - eta`.
    pub eta: f64,
    /// Variance constant.
    pub c_v: f64,
    /// Bias constant.
    pub c_b: f64,
    /// Hölder order of the joint density.
    pub beta: f64,
    /// Total dimension `d_x + d_y + d_z`.
    pub d: usize,
}

impl ConcentrationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_owned()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must lie in (0, 1]");
        }
        if !(self.c_v >= 0.0 && self.c_v.is_finite()) || !(self.c_b >= 0.0 && self.c_b.is_finite()) {
            return bad("C_V and C_B must be finite and nonnegative");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad("beta must lie in (0, 1]");
        }
        if self.d == 0 {
            return bad("d must be at least 1");
        }
        Ok(())
    }

    fn variance_term(&self, log_confidence: f64) -> f64 {
        (4.0 * self.c_v * self.c_v / self.n as f64 * log_confidence).sqrt()
    }

    fn bias_term(&self) -> f64 {
        self.c_b * (self.n as f64).powf(-self.beta / (self.beta + self.d as f64))
    }
}

/// `sqrt(4 C_V^2 / n * ln(2 / eta)) + C_B * n^(-beta / (beta + d))`.
pub fn concentration_bound(p: &ConcentrationParams) -> Result<f64> {
    p.validate()?;
    Ok(p.variance_term((2.0 / p.eta).ln()) + p.bias_term())
}

/// Same bound with the `2^(d+1)` union factor in place of `2`, as needed when
/// every density over a `d`-dimensional variable set must hold simultaneously.
pub fn union_concentration_bound(p: &ConcentrationParams) -> Result<f64> {
    p.validate()?;
    let log_conf = (p.d as f64 + 1.0) * std::f64::consts::LN_2 - p.eta.ln();
    Ok(p.variance_term(log_conf) + p.bias_term())
}
