//! Transfer entropy between lagged series, with and without conditioning.
//!
//! X0 drives X1 which drives Y, so X0's influence on Y disappears once X1 is
//! conditioned on.

use std::collections::BTreeSet;

use tefs::scm::{generate, BuiltinGraph};
use tefs::{standardize, transfer_entropy, Backend, EstimatorConfig, LagSpec};

fn main() -> tefs::Result<()> {
    let g = BuiltinGraph::Graph3;
    let spec = g.template().into_spec(g.canonical_edges(), 0.1, 1000, 7);
    let (ds, _) = generate(&spec)?;
    let ds = standardize(&ds)?;
    let lags = LagSpec::new(2, 2)?;
    let none = BTreeSet::new();

    for backend in [Backend::GaussianClosedForm, Backend::KnnKsg] {
        let est = EstimatorConfig::with_backend(backend);
        let direct = transfer_entropy(&ds, &[1].into(), &none, lags, &est)?;
        let indirect = transfer_entropy(&ds, &[0].into(), &none, lags, &est)?;
        let screened = transfer_entropy(&ds, &[0].into(), &[1].into(), lags, &est)?;
        println!("{backend:?}");
        println!("  TE X1 -> Y        {direct:.4}");
        println!("  TE X0 -> Y        {indirect:.4}");
        println!("  TE X0 -> Y | X1   {screened:.4}");
    }
    Ok(())
}
