//! Compare the CMI backends on a correlated Gaussian pair and on discrete data.
//!
//! cargo run --example estimate_cmi

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tefs::{cmi, Backend, EstimatorConfig};

fn main() -> tefs::Result<()> {
    let n = 3000;
    let rho: f64 = 0.6;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut x = Array2::zeros((n, 1));
    let mut y = Array2::zeros((n, 1));
    for i in 0..n {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        x[[i, 0]] = a;
        y[[i, 0]] = rho * a + (1.0 - rho * rho).sqrt() * b;
    }
    let none = Array2::zeros((n, 0));
    println!("bivariate normal, rho = {rho}, exact MI = {:.4}", -0.5 * (1.0 - rho * rho).ln());
    for backend in [Backend::GaussianClosedForm, Backend::GaussianBic, Backend::KnnKsg] {
        let est = cmi(x.view(), y.view(), none.view(), &EstimatorConfig::with_backend(backend))?;
        println!("  {backend:?}: {est:.4}");
    }

    // Y copies X with a 10% flip, Z is irrelevant: I(X;Y|Z) = ln 2 - H(0.1)
    let mut xs = Array2::zeros((n, 1));
    let mut ys = Array2::zeros((n, 1));
    let mut zs = Array2::zeros((n, 1));
    for i in 0..n {
        let bit = rng.random_bool(0.5) as u8 as f64;
        xs[[i, 0]] = bit;
        ys[[i, 0]] = if rng.random_bool(0.1) { 1.0 - bit } else { bit };
        zs[[i, 0]] = rng.random_range(0..3) as f64;
    }
    let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
    let plugin = cmi(
        xs.view(),
        ys.view(),
        zs.view(),
        &EstimatorConfig::with_backend(Backend::DiscretePlugin),
    )?;
    println!("noisy binary copy: plug-in {plugin:.4}, exact {:.4}", std::f64::consts::LN_2 - h);
    Ok(())
}
