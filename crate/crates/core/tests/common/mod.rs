#![allow(dead_code)]

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `n` draws of a standard bivariate normal with correlation `rho`, as two n x 1 columns.
pub fn bivariate(n: usize, rho: f64, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let mut r = rng(seed);
    let mut x = Array2::zeros((n, 1));
    let mut y = Array2::zeros((n, 1));
    let s = (1.0 - rho * rho).sqrt();
    for i in 0..n {
        let a = normal(&mut r);
        let b = normal(&mut r);
        x[[i, 0]] = a;
        y[[i, 0]] = rho * a + s * b;
    }
    (x, y)
}

pub fn gaussian_matrix(n: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut r = rng(seed);
    Array2::from_shape_fn((n, cols), |_| normal(&mut r))
}

/// Mutual information of a standard bivariate normal by midpoint quadrature of
/// `p ln(p / (p_x p_y))` over `[-10, 10]^2`. Independent of the log-det formula.
pub fn gaussian_mi_quadrature(rho: f64) -> f64 {
    let m = 2000;
    let (lo, hi) = (-10.0_f64, 10.0_f64);
    let h = (hi - lo) / m as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let det = 1.0 - rho * rho;
    let phi = |u: f64| (-0.5 * u * u).exp() / two_pi.sqrt();
    let mut acc = 0.0;
    for i in 0..m {
        let x = lo + (i as f64 + 0.5) * h;
        for j in 0..m {
            let y = lo + (j as f64 + 0.5) * h;
            let q = (x * x - 2.0 * rho * x * y + y * y) / det;
            let p = (-0.5 * q).exp() / (two_pi * det.sqrt());
            if p > 0.0 {
                acc += p * (p / (phi(x) * phi(y))).ln();
            }
        }
    }
    acc * h * h
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Random ternary symbols.
pub fn ternary(n: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    use rand::Rng;
    Array2::from_shape_fn((n, cols), |_| rng.random_range(0..3) as f64)
}
