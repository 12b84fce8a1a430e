//! Plug-in CMI on integer-coded symbols.

use std::collections::HashMap;

use ndarray::ArrayView2;

use crate::error::{Error, Result};

type Key = Vec<i64>;

fn symbols(m: &ArrayView2<f64>) -> Result<Vec<Key>> {
    m.rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .map(|&v| {
                    if v.fract() != 0.0 || !v.is_finite() || v.abs() > 9.0e15 {
                        Err(Error::NonIntegerSymbols(v))
                    } else {
                        Ok(v as i64)
                    }
                })
                .collect()
        })
        .collect()
}

fn concat(a: &Key, b: &Key) -> Key {
    let mut k = Vec::with_capacity(a.len() + b.len());
    k.extend_from_slice(a);
    k.extend_from_slice(b);
    k
}

/// Exact plug-in `I(X;Y|Z)` from empirical frequencies.
///
/// Evaluated as `(1/n) sum c(x,y,z) ln[c(x,y,z) c(z) / (c(x,z) c(y,z))]` over
/// observed cells, so a factorising table yields exactly zero.
pub fn cmi(x: ArrayView2<f64>, y: ArrayView2<f64>, z: ArrayView2<f64>) -> Result<f64> {
    let n = x.nrows();
    let (xs, ys, zs) = (symbols(&x)?, symbols(&y)?, symbols(&z)?);

    let mut c_xyz: HashMap<(Key, Key, Key), u64> = HashMap::new();
    let mut c_xz: HashMap<Key, u64> = HashMap::new();
    let mut c_yz: HashMap<Key, u64> = HashMap::new();
    let mut c_z: HashMap<Key, u64> = HashMap::new();
    for ((xk, yk), zk) in xs.iter().zip(&ys).zip(&zs) {
        *c_xz.entry(concat(xk, zk)).or_default() += 1;
        *c_yz.entry(concat(yk, zk)).or_default() += 1;
        *c_z.entry(zk.clone()).or_default() += 1;
        *c_xyz
            .entry((xk.clone(), yk.clone(), zk.clone()))
            .or_default() += 1;
    }

    // sort cells so the summation order is deterministic
    let mut cells: Vec<_> = c_xyz.into_iter().collect();
    cells.sort_unstable();
    let total: f64 = cells
        .iter()
        .map(|((xk, yk, zk), c)| {
            let num = (*c as u128) * (c_z[zk] as u128);
            let den = (c_xz[&concat(xk, zk)] as u128) * (c_yz[&concat(yk, zk)] as u128);
            if num == den {
                0.0
            } else {
                *c as f64 * (num as f64 / den as f64).ln()
            }
        })
        .sum();
    Ok((total / n as f64).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array2, Axis};

    fn col(v: &[f64]) -> Array2<f64> {
        Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()
    }

    fn empty(n: usize) -> Array2<f64> {
        Array2::zeros((n, 0))
    }

    #[test]
    fn copy_of_fair_bit_is_ln2() {
        let b = col(&[0., 1., 0., 1., 1., 0., 1., 0.]);
        let v = cmi(b.view(), b.view(), empty(8).view()).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn independent_bits_are_exactly_zero() {
        let x = col(&[0., 0., 1., 1.]);
        let y = col(&[0., 1., 0., 1.]);
        assert_eq!(cmi(x.view(), y.view(), empty(4).view()).unwrap(), 0.0);
    }

    #[test]
    fn conditional_independence_table() {
        // within each z stratum, x and y factorise
        let x = col(&[0., 0., 1., 1., 0., 1., 0., 1.]);
        let y = col(&[0., 1., 0., 1., 2., 2., 2., 2.]);
        let z = col(&[0., 0., 0., 0., 1., 1., 1., 1.]);
        assert_eq!(cmi(x.view(), y.view(), z.view()).unwrap(), 0.0);
        // xor: pairwise independent, conditionally dependent
        let x = col(&[0., 0., 1., 1.]);
        let z = col(&[0., 1., 0., 1.]);
        let y = col(&[0., 1., 1., 0.]);
        assert_eq!(cmi(x.view(), y.view(), empty(4).view()).unwrap(), 0.0);
        let v = cmi(x.view(), y.view(), z.view()).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_fractional_symbols() {
        let x = col(&[0.5, 1.0, 0.0, 1.0]);
        assert!(matches!(
            cmi(x.view(), x.view(), empty(4).view()),
            Err(Error::NonIntegerSymbols(v)) if v == 0.5
        ));
    }

    #[test]
    fn multi_column_blocks() {
        // x = (a, b), y = a: I = H(a) = ln 2 regardless of b
        let a = [0., 1., 0., 1., 0., 1., 0., 1.];
        let b = [0., 0., 1., 1., 0., 0., 1., 1.];
        let x = ndarray::concatenate(Axis(1), &[col(&a).view(), col(&b).view()]).unwrap();
        let v = cmi(x.view(), col(&a).view(), empty(8).view()).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
