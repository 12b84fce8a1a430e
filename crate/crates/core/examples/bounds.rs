//! Error-bound bookkeeping for a finished selection, with the finite-sample slack.

use tefs::estimators::ConcentrationParams;
use tefs::scm::{generate, BuiltinGraph};
use tefs::selection::{compute_bounds, finite_sample_excess, total_transfer_entropy};
use tefs::{forward_tefs, standardize, Backend, EstimatorConfig, LagSpec, SelectionConfig};

fn main() -> tefs::Result<()> {
    let g = BuiltinGraph::Graph3;
    let (ds, _) = generate(&g.template().into_spec(g.canonical_edges(), 0.1, 500, 4))?;
    let ds = standardize(&ds)?;
    let lags = LagSpec::new(2, 2)?;
    let cfg = SelectionConfig {
        estimator: EstimatorConfig::with_backend(Backend::GaussianClosedForm),
        ..SelectionConfig::new(lags, 0.5)
    };

    let res = forward_tefs(&ds, &cfg)?;
    let total = total_transfer_entropy(&ds, &cfg)?;
    let report = compute_bounds(&res, &cfg, Some(total))?;
    println!("selected {:?}, B = {:.3}, TE(all) = {total:.4}", res.selected, res.target_bound);
    println!("MSE <= {}", report.expression);

    let params = ConcentrationParams { n: ds.len(), eta: 0.05, c_v: 1.0, c_b: 1.0, beta: 1.0, d: 1 };
    let slack = finite_sample_excess(&report, &res, lags, ds.n_features(), &params)?;
    println!("with 95% finite-sample slack: sigma^2 + {slack:.3}");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}
