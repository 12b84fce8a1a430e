//! Causal feature selection for time series driven by conditional transfer entropy.
//!
//! The crate is organised bottom-up:
//!
//! - [`timeseries`]: dataset loading, standardization, lag embedding and temporal splits.
//! - [`estimators`]: conditional mutual information and transfer entropy backends
//!   (discrete plug-in, Gaussian closed form with and without a Schwarz penalty,
//!   k-nearest-neighbour KSG) plus the
//!   finite-sample concentration bound.
//! - [`scm`]: linear lagged structural causal models and the builtin benchmark graphs.
//! - [`selection`]: forward and backward transfer-entropy feature selection and the
//!   error-bound bookkeeping that goes with them.
//! - [`evaluation`]: TPR/FPR scoring, out-of-sample R², and benchmark sweeps.
//! - [`cli`]: the `tefs` command-line front end.
//!
//! All information quantities are in nats.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod scm;
pub mod selection;
pub mod timeseries;

pub use error::{Error, Result};
pub use estimators::{cmi, transfer_entropy, Backend, EstimatorConfig};
pub use evaluation::{r2_linear, run_benchmark, tpr_fpr, BenchmarkConfig, EvalReport};
pub use scm::{builtin_graph, generate, BuiltinGraph, GroundTruth, Node, ScmSpec};
pub use selection::{backward_tefs, forward_tefs, Direction, SelectionConfig, SelectionResult, StopReason, Task};
pub use timeseries::{embed, load_csv, standardize, temporal_split, LagSpec, TimeSeriesDataset};
