//! Frenzel-Pompe conditional KSG estimator with max-norm neighbourhoods.
//!
//! For each sample `i`, `eps_i` is the max-norm distance to its `k`-th nearest
//! neighbour in the joint `(x, y, z)` space. With `n_xz`, `n_yz`, `n_z` the
//! number of other samples strictly within `eps_i` in the respective marginal
//! spaces,
//!
//! ```text
//! I(X;Y|Z) = psi(k) - < psi(n_xz + 1) + psi(n_yz + 1) - psi(n_z + 1) >
//! ```
//!
//! With `Z` empty, `n_z + 1 = n` for every sample and the formula reduces to
//! the first KSG algorithm.

use ndarray::{concatenate, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::kdtree::KdTree;

/// `psi(m)` for `m = 0..=max` (index 0 unused).
pub(crate) fn digamma_table(max: usize) -> Vec<f64> {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut t = vec![f64::NAN; max + 1];
    if max >= 1 {
        t[1] = -EULER_GAMMA;
    }
    for m in 2..=max {
        t[m] = t[m - 1] + 1.0 / (m - 1) as f64;
    }
    t
}

fn row_major(m: &Array2<f64>) -> Vec<f64> {
    m.as_standard_layout().iter().copied().collect()
}

pub(crate) fn jitter(m: ArrayView2<f64>, amplitude: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut out = m.to_owned();
    if amplitude > 0.0 {
        for v in out.iter_mut() {
            let e: f64 = StandardNormal.sample(rng);
            *v += amplitude * e;
        }
    }
    out
}

pub fn cmi(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    z: ArrayView2<f64>,
    k: usize,
    noise_tiebreak: f64,
    seed: u64,
) -> f64 {
    let n = x.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = jitter(x, noise_tiebreak, &mut rng);
    let y = jitter(y, noise_tiebreak, &mut rng);
    let z = jitter(z, noise_tiebreak, &mut rng);
    let has_z = z.ncols() > 0;

    let tree = |parts: &[&Array2<f64>]| {
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        let m = concatenate(Axis(1), &views).expect("row counts checked by caller");
        let dim = m.ncols();
        KdTree::new(row_major(&m), dim)
    };
    let joint = tree(&[&x, &y, &z]);
    let xz = tree(&[&x, &z]);
    let yz = tree(&[&y, &z]);
    let zt = has_z.then(|| tree(&[&z]));

    let psi = digamma_table(n + 1);
    let terms: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let eps = joint.kth_neighbor_distance(i, k);
            let n_xz = xz.count_within(i, eps);
            let n_yz = yz.count_within(i, eps);
            let n_z = zt.as_ref().map_or(n - 1, |t| t.count_within(i, eps));
            psi[n_xz + 1] + psi[n_yz + 1] - psi[n_z + 1]
        })
        .collect();
    let mean = terms.iter().sum::<f64>() / n as f64;
    psi[k] - mean
}
