//! Backward elimination on graph5, regression and classification thresholds side by side.

use tefs::scm::{generate, BuiltinGraph};
use tefs::{backward_tefs, standardize, Backend, EstimatorConfig, LagSpec, SelectionConfig, Task};

fn main() -> tefs::Result<()> {
    let g = BuiltinGraph::Graph5;
    let (ds, truth) = generate(&g.template().into_spec(g.canonical_edges(), 0.1, 300, 2))?;
    let ds = standardize(&ds)?;
    println!("true parents {:?}", truth.true_features());

    let lags = LagSpec::new(g.default_lag(), g.default_lag())?;
    for (task, delta) in [(Task::Regression, 1e-6), (Task::Regression, 0.2), (Task::Classification, 0.3)] {
        let cfg = SelectionConfig {
            task,
            target_bound: Some(1.0),
            estimator: EstimatorConfig::with_backend(Backend::GaussianBic),
            ..SelectionConfig::new(lags, delta)
        };
        let res = backward_tefs(&ds, &cfg)?;
        println!(
            "{task:?} delta={delta}: kept {:?}, removed {:?} (loss {:.4} of {:.4})",
            res.selected,
            res.removed,
            res.cumulative(),
            res.threshold_used
        );
    }
    Ok(())
}
