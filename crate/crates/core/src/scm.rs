//! Linear lagged structural causal models and the builtin benchmark graphs.
//!
//! Every node is a linear combination of lagged parent values plus independent
//! Gaussian noise. Nodes listed as [`Driver`]s instead follow their own AR(1)
//! recursion and take no parents.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesDataset;

/// Any generated value above this magnitude aborts the simulation.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
pub const DEFAULT_BURN_IN: usize = 200;
/// AR(1) coefficient of the parentless driver nodes in the builtin graphs.
pub const DRIVER_PHI: f64 = 0.7;

/// A graph node: one of the features or the target. Serialises as the feature
/// index, or the string `"Y"` for the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Feature(usize),
    Target,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Feature(i) => write!(f, "X{i}"),
            Node::Target => f.write_str("Y"),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Node::Feature(i) => ser.serialize_u64(*i as u64),
            Node::Target => ser.serialize_str("Y"),
        }
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Name(String),
        }
        match Raw::deserialize(de)? {
            Raw::Index(i) => Ok(Node::Feature(i)),
            Raw::Name(s) if s == "Y" => Ok(Node::Target),
            Raw::Name(s) => s
                .strip_prefix('X')
                .and_then(|d| d.parse().ok())
                .map(Node::Feature)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid node `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: Node,
    pub dest: Node,
    pub lag: usize,
    pub coef: f64,
}

/// An edge whose coefficient may still have to be drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTemplate {
    pub source: Node,
    pub dest: Node,
    pub lag: usize,
    #[serde(default)]
    pub coef: Option<f64>,
}

/// A parentless feature following `x_t = phi * x_{t-1} + innovation_std * e_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Driver {
    pub node: usize,
    pub phi: f64,
    pub innovation_std: f64,
}

impl Driver {
    /// Unit stationary variance AR(1) driver.
    pub fn ar1(node: usize, phi: f64) -> Self {
        Self {
            node,
            phi,
            innovation_std: (1.0 - phi * phi).sqrt(),
        }
    }

    /// I.i.d. standard normal node.
    pub fn white(node: usize) -> Self {
        Self {
            node,
            phi: 0.0,
            innovation_std: 1.0,
        }
    }
}

/// Graph topology with (possibly) unset coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphTemplate {
    pub n_features: usize,
    pub edges: Vec<EdgeTemplate>,
    #[serde(default)]
    pub drivers: Vec<Driver>,
}

impl GraphTemplate {
    /// Turn into a full model specification with the given coefficients.
    pub fn into_spec(
        &self,
        edges: Vec<Edge>,
        noise_std: f64,
        length: usize,
        seed: u64,
    ) -> ScmSpec {
        ScmSpec {
            n_features: self.n_features,
            edges,
            noise_std,
            length,
            burn_in: DEFAULT_BURN_IN,
            seed,
            drivers: self.drivers.clone(),
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth::from_edges(self.edges.iter().map(|e| (e.source, e.dest)))
    }
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

/// A fully specified linear SCM ready for simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmSpec {
    pub n_features: usize,
    pub edges: Vec<Edge>,
    pub noise_std: f64,
    pub length: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drivers: Vec<Driver>,
}

impl ScmSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_features == 0 {
            return bad("n_features must be at least 1".into());
        }
        if self.length < 2 {
            return bad(format!("length must be at least 2, got {}", self.length));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std must be finite and >= 0, got {}", self.noise_std));
        }
        let in_range = |n: Node| match n {
            Node::Feature(i) => i < self.n_features,
            Node::Target => true,
        };
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !in_range(e.source) || !in_range(e.dest) {
                return bad(format!("edge {} -> {} references an unknown node", e.source, e.dest));
            }
            if e.lag == 0 {
                return bad(format!("edge {} -> {} has lag 0", e.source, e.dest));
            }
            if !e.coef.is_finite() {
                return bad(format!("edge {} -> {} has a non-finite coefficient", e.source, e.dest));
            }
            if !seen.insert((e.source, e.dest, e.lag)) {
                return bad(format!(
                    "duplicate edge {} -> {} at lag {}",
                    e.source, e.dest, e.lag
                ));
            }
        }
        let mut driven = HashSet::new();
        for d in &self.drivers {
            if d.node >= self.n_features {
                return bad(format!("driver X{} out of range", d.node));
            }
            if !driven.insert(d.node) {
                return bad(format!("X{} listed as a driver twice", d.node));
            }
            if !(d.phi.is_finite() && d.innovation_std >= 0.0 && d.innovation_std.is_finite()) {
                return bad(format!("driver X{} has invalid parameters", d.node));
            }
            if self.edges.iter().any(|e| e.dest == Node::Feature(d.node)) {
                return bad(format!("driver X{} cannot have incoming edges", d.node));
            }
        }
        Ok(())
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth::from_edges(self.edges.iter().map(|e| (e.source, e.dest)))
    }
}

/// Direct causal parents of the target, at any lag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub true_target_links: BTreeSet<Node>,
}

impl GroundTruth {
    fn from_edges(edges: impl Iterator<Item = (Node, Node)>) -> Self {
        Self {
            true_target_links: edges
                .filter(|&(_, d)| d == Node::Target)
                .map(|(s, _)| s)
                .collect(),
        }
    }

    /// Feature indices among the true links (the target's own autoregression excluded).
    pub fn true_features(&self) -> BTreeSet<usize> {
        self.true_target_links
            .iter()
            .filter_map(|n| match n {
                Node::Feature(i) => Some(*i),
                Node::Target => None,
            })
            .collect()
    }
}

/// Simulate the model and return the post-burn-in window plus the target's parents.
pub fn generate(spec: &ScmSpec) -> Result<(TimeSeriesDataset, GroundTruth)> {
    spec.validate()?;
    let d = spec.n_features;
    let n_nodes = d + 1;
    let idx = |n: Node| match n {
        Node::Feature(i) => i,
        Node::Target => d,
    };
    let total = spec.burn_in + spec.length;

    // incoming edges per node as (source index, lag, coef)
    let mut parents: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n_nodes];
    for e in &spec.edges {
        parents[idx(e.dest)].push((idx(e.source), e.lag, e.coef));
    }
    let mut driver: Vec<Option<Driver>> = vec![None; n_nodes];
    for dr in &spec.drivers {
        driver[dr.node] = Some(*dr);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Array2::<f64>::zeros((total, n_nodes));
    for t in 0..total {
        for v in 0..n_nodes {
            let e: f64 = StandardNormal.sample(&mut rng);
            let x = match driver[v] {
                Some(dr) => {
                    let prev = if t > 0 { values[[t - 1, v]] } else { 0.0 };
                    dr.phi * prev + dr.innovation_std * e
                }
                None => {
                    let drive: f64 = parents[v]
                        .iter()
                        .filter(|&&(_, lag, _)| lag <= t)
                        .map(|&(src, lag, c)| c * values[[t - lag, src]])
                        .sum();
                    drive + spec.noise_std * e
                }
            };
            if !(x.abs() <= DIVERGENCE_LIMIT) {
                let node = if v == d { Node::Target } else { Node::Feature(v) };
                return Err(Error::Unstable {
                    step: t,
                    node: node.to_string(),
                });
            }
            values[[t, v]] = x;
        }
    }

    let window = values.slice(s![spec.burn_in.., ..]);
    let features = window.slice(s![.., ..d]).to_owned();
    let target: Array1<f64> = window.column(d).to_owned();
    let names = (0..d).map(|i| format!("X{i}")).collect();
    let ds = TimeSeriesDataset::new(features, target, names, "Y")?;
    Ok((ds, spec.ground_truth()))
}

/// Draw every unset coefficient uniformly from `[-1, -0.5] U [0.5, 1]`.
/// Coefficients already present in the template are kept.
pub fn sample_coefficients(template: &[EdgeTemplate], seed: u64) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    template
        .iter()
        .map(|e| Edge {
            source: e.source,
            dest: e.dest,
            lag: e.lag,
            coef: e.coef.unwrap_or_else(|| banded_coefficient(&mut rng)),
        })
        .collect()
}

fn banded_coefficient(rng: &mut impl Rng) -> f64 {
    let magnitude = rng.random_range(0.5..=1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// The benchmark topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinGraph {
    Graph3,
    Graph5,
    Graph10,
}

impl FromStr for BuiltinGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph3" => Ok(Self::Graph3),
            "graph5" => Ok(Self::Graph5),
            "graph10" => Ok(Self::Graph10),
            other => Err(Error::UnknownGraph(other.to_owned())),
        }
    }
}

impl fmt::Display for BuiltinGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Graph3 => "graph3",
            Self::Graph5 => "graph5",
            Self::Graph10 => "graph10",
        })
    }
}

use Node::{Feature as F, Target as Y};

// (source, dest, lag, canonical coefficient)
type Row = (Node, Node, usize, f64);

/// X0 -> X1 -> Y with an autoregressive target. X0 is an indirect ancestor.
const GRAPH3: &[Row] = &[
    (F(0), F(1), 1, 0.8),
    (F(1), Y, 1, 0.7),
    (Y, Y, 1, 0.6),
];

/// Drivers X1, X3. Chain X1 -> X0 -> Y; X3 is a common cause of X2 and Y.
const GRAPH5: &[Row] = &[
    (F(1), F(0), 1, 0.9),
    (F(0), Y, 2, 0.6),
    (F(3), Y, 1, -0.7),
    (F(3), F(2), 2, 0.8),
    (F(2), F(2), 1, 0.5),
    (Y, Y, 1, 0.5),
];

/// Drivers X0, X5, X7. Chain X0 -> X1 -> X2 -> Y; X5 confounds X6 and Y;
/// X7 -> X8 -> X3 is an unrelated cluster; X4 is a child of the target.
const GRAPH10: &[Row] = &[
    (F(0), F(1), 1, 0.8),
    (F(1), F(2), 2, 0.7),
    (F(2), Y, 1, 0.6),
    (F(5), Y, 2, -0.7),
    (F(5), F(6), 3, 0.8),
    (F(7), F(8), 1, 0.9),
    (F(8), F(3), 2, 0.6),
    (F(3), F(3), 1, 0.5),
    (Y, F(4), 1, 0.8),
    (Y, Y, 1, 0.5),
];

impl BuiltinGraph {
    fn rows(self) -> &'static [Row] {
        match self {
            Self::Graph3 => GRAPH3,
            Self::Graph5 => GRAPH5,
            Self::Graph10 => GRAPH10,
        }
    }

    pub fn n_features(self) -> usize {
        match self {
            Self::Graph3 => 2,
            Self::Graph5 => 4,
            Self::Graph10 => 9,
        }
    }

    pub fn drivers(self) -> &'static [usize] {
        match self {
            Self::Graph3 => &[0],
            Self::Graph5 => &[1, 3],
            Self::Graph10 => &[0, 5, 7],
        }
    }

    /// Default lag depth `L = M` for benchmark runs.
    pub fn default_lag(self) -> usize {
        match self {
            Self::Graph3 | Self::Graph5 => 2,
            Self::Graph10 => 3,
        }
    }

    /// Topology with every coefficient unset.
    pub fn template(self) -> GraphTemplate {
        GraphTemplate {
            n_features: self.n_features(),
            edges: self
                .rows()
                .iter()
                .map(|&(source, dest, lag, _)| EdgeTemplate {
                    source,
                    dest,
                    lag,
                    coef: None,
                })
                .collect(),
            drivers: self
                .drivers()
                .iter()
                .map(|&i| Driver::ar1(i, DRIVER_PHI))
                .collect(),
        }
    }

    /// Edges with the fixed benchmark coefficients.
    pub fn canonical_edges(self) -> Vec<Edge> {
        self.rows()
            .iter()
            .map(|&(source, dest, lag, coef)| Edge {
                source,
                dest,
                lag,
                coef,
            })
            .collect()
    }
}

/// Look up a builtin topology by name.
pub fn builtin_graph(name: &str) -> Result<GraphTemplate> {
    Ok(name.parse::<BuiltinGraph>()?.template())
}

/// Append `n_triples` groups of three features disconnected from the original graph:
/// `A` i.i.d. standard normal, `B_t = c1 A_{t-1} + e`, `C_t = c2 B_{t-2} + c3 C_{t-3} + e`,
/// with `c1, c2, c3 ~ U[-1, 1]`.
pub fn extend_with_noise_triples(
    template: &GraphTemplate,
    n_triples: usize,
    seed: u64,
) -> GraphTemplate {
    let mut out = template.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_triples {
        push_group(&mut out, 3, &mut rng);
    }
    out
}

/// Extend with noise triples until the model has `total_variables` variables
/// (features plus target). When the gap is not a multiple of three the last
/// group is truncated after `A` or after `B`.
pub fn extend_to_dimension(
    template: &GraphTemplate,
    total_variables: usize,
    seed: u64,
) -> Result<GraphTemplate> {
    let current = template.n_features + 1;
    if total_variables < current {
        return Err(Error::InvalidSpec(format!(
            "cannot shrink a {current}-variable graph to {total_variables} variables"
        )));
    }
    let gap = total_variables - current;
    let mut out = template.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..gap / 3 {
        push_group(&mut out, 3, &mut rng);
    }
    if !gap.is_multiple_of(3) {
        push_group(&mut out, gap % 3, &mut rng);
    }
    Ok(out)
}

fn push_group(out: &mut GraphTemplate, size: usize, rng: &mut ChaCha8Rng) {
    let a = out.n_features;
    out.drivers.push(Driver::white(a));
    let mut coef = || Some(rng.random_range(-1.0..=1.0));
    if size >= 2 {
        out.edges.push(EdgeTemplate { source: F(a), dest: F(a + 1), lag: 1, coef: coef() });
    }
    if size >= 3 {
        out.edges.push(EdgeTemplate { source: F(a + 1), dest: F(a + 2), lag: 2, coef: coef() });
        out.edges.push(EdgeTemplate { source: F(a + 2), dest: F(a + 2), lag: 3, coef: coef() });
    }
    out.n_features += size;
}
