#![allow(dead_code)]

use cointegrate::{Frame, Period};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn start() -> Period {
    Period::new(1980, 1).unwrap()
}

/// `y1` a random walk, `y2 = y1 + u` with `u` a stationary AR(1).
pub fn bivariate_coint(t: usize, seed: u64) -> Frame {
    let mut r = rng(seed);
    let mut data = DMatrix::zeros(t, 2);
    let (mut w, mut u) = (0.0, 0.0);
    for i in 0..t {
        w += normal(&mut r);
        u = 0.5 * u + normal(&mut r);
        data[(i, 0)] = w;
        data[(i, 1)] = w + u;
    }
    Frame::new(vec!["y1".into(), "y2".into()], start(), data).unwrap()
}

/// Stable VAR(p) with small random coefficients plus an intercept.
pub fn stable_var(t: usize, k: usize, p: usize, seed: u64) -> (Frame, Vec<DMatrix<f64>>) {
    let mut r = rng(seed);
    let coefs: Vec<DMatrix<f64>> = (0..p)
        .map(|l| DMatrix::from_fn(k, k, |i, j| {
            let base = if i == j && l == 0 { 0.4 } else { 0.0 };
            base + 0.1 * normal(&mut r) / (l + 1) as f64
        }))
        .collect();
    let burn = 200;
    let mut y = DMatrix::zeros(t + burn, k);
    for s in p..t + burn {
        for i in 0..k {
            let mut v = 0.5 + normal(&mut r);
            for (l, a) in coefs.iter().enumerate() {
                for j in 0..k {
                    v += a[(i, j)] * y[(s - l - 1, j)];
                }
            }
            y[(s, i)] = v;
        }
    }
    let names = (1..=k).map(|i| format!("x{i}")).collect();
    let f = Frame::new(names, start(), y.rows(burn, t).into_owned()).unwrap();
    (f, coefs)
}

/// Independent Gaussian random walks.
pub fn random_walks(t: usize, k: usize, seed: u64) -> Frame {
    let mut r = rng(seed);
    let mut data = DMatrix::zeros(t, k);
    for i in 0..t {
        for j in 0..k {
            let prev = if i == 0 { 0.0 } else { data[(i - 1, j)] };
            data[(i, j)] = prev + normal(&mut r);
        }
    }
    let names = (1..=k).map(|i| format!("w{i}")).collect();
    Frame::new(names, start(), data).unwrap()
}

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
