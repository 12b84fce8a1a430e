//! Out-of-sample R² of a linear autoregression on the selected features versus
//! on every feature and on the target's own past alone.

use std::collections::BTreeSet;

use tefs::scm::{generate, BuiltinGraph};
use tefs::{r2_linear, temporal_split, LagSpec};

fn main() -> tefs::Result<()> {
    let g = BuiltinGraph::Graph5;
    let (ds, truth) = generate(&g.template().into_spec(g.canonical_edges(), 0.3, 600, 9))?;
    let (train, test) = temporal_split(&ds, 0.7)?;
    let lags = LagSpec::new(g.default_lag(), g.default_lag())?;

    let candidates = [
        ("own past only", BTreeSet::new()),
        ("true parents", truth.true_features()),
        ("all features", (0..ds.n_features()).collect()),
    ];
    for (name, set) in candidates {
        let (fit, held_out) = r2_linear(&train, &test, &set, lags)?;
        println!("{name:<14} train {fit:.3}  test {held_out:.3}");
    }
    Ok(())
}
