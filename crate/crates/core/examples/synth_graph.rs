//! Simulate the builtin graphs and a hand-written model, then print the ground truth.

use tefs::scm::{
    extend_to_dimension, generate, sample_coefficients, BuiltinGraph, Edge, Node, ScmSpec,
};

fn main() -> tefs::Result<()> {
    for g in [BuiltinGraph::Graph3, BuiltinGraph::Graph5, BuiltinGraph::Graph10] {
        let t = g.template();
        let spec = t.into_spec(g.canonical_edges(), 0.1, 300, 0);
        let (ds, truth) = generate(&spec)?;
        println!(
            "{g:?}: {} features, {} rows, parents of Y {:?}",
            ds.n_features(),
            ds.len(),
            truth.true_target_links
        );
    }

    // banded random coefficients and 20 extra variables of pure nuisance structure
    let g = BuiltinGraph::Graph10;
    let wide = extend_to_dimension(&g.template(), 30, 5)?;
    let spec = wide.into_spec(sample_coefficients(&wide.edges, 5), 0.1, 300, 5);
    let (ds, truth) = generate(&spec)?;
    println!("graph10 widened: {} features, true features {:?}", ds.n_features(), truth.true_features());

    let custom = ScmSpec {
        n_features: 2,
        edges: vec![
            Edge { source: Node::Feature(0), dest: Node::Feature(1), lag: 1, coef: 0.7 },
            Edge { source: Node::Feature(1), dest: Node::Target, lag: 2, coef: 0.9 },
            Edge { source: Node::Target, dest: Node::Target, lag: 1, coef: 0.3 },
        ],
        noise_std: 0.2,
        length: 500,
        burn_in: 100,
        seed: 11,
        drivers: Vec::new(),
    };
    let (ds, truth) = generate(&custom)?;
    println!("custom: first rows of Y {:?}", &ds.target().as_slice().unwrap()[..4]);
    println!("custom truth as JSON: {}", serde_json::to_string(&truth).unwrap());
    Ok(())
}
