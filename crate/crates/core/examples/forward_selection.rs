//! Forward selection on the ten-feature graph padded with nuisance variables.

use tefs::scm::{extend_to_dimension, generate, sample_coefficients, BuiltinGraph};
use tefs::{forward_tefs, standardize, Backend, EstimatorConfig, LagSpec, SelectionConfig};

fn main() -> tefs::Result<()> {
    let g = BuiltinGraph::Graph10;
    let template = extend_to_dimension(&g.template(), 40, 3)?;
    let edges = sample_coefficients(&template.edges, 3);
    let (ds, truth) = generate(&template.into_spec(edges, 0.1, 300, 3))?;
    let ds = standardize(&ds)?;

    let cfg = SelectionConfig {
        target_bound: Some(1.0),
        estimator: EstimatorConfig::with_backend(Backend::GaussianBic),
        ebic_gamma: 1.0,
        ..SelectionConfig::new(LagSpec::new(g.default_lag(), g.default_lag())?, 100.0)
    };
    let res = forward_tefs(&ds, &cfg)?;
    println!("{} candidate features, true parents {:?}", ds.n_features(), truth.true_features());
    for s in &res.steps {
        println!("  add X{:<3} te {:.4}  cumulative {:.4}", s.feature, s.te, s.cumulative);
    }
    println!("stopped: {:?} after {} steps", res.stop_reason, res.iterations_k);
    Ok(())
}
