//! Simulation of cointegrated VECM systems.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, Period};
use crate::linalg::cholesky_lower;

/// `ΔY_t = α β' Y_{t-1} + Σ Γ_i ΔY_{t-i} + ε_t`, `ε_t ~ N(0, noise_cov)`.
/// Matrices are nested row-major lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub k: usize,
    pub rank: usize,
    /// `k x rank`.
    pub alpha: Vec<Vec<f64>>,
    /// `k x rank`.
    pub beta: Vec<Vec<f64>>,
    #[serde(default)]
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub noise_cov: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(default)]
    pub burn_in: usize,
    pub seed: u64,
    #[serde(default)]
    pub names: Option<Vec<String>>,
    #[serde(default)]
    pub start: Option<Period>,
}

const UNIT_TOL: f64 = 1e-6;

fn matrix(name: &str, rows: &[Vec<f64>], r: usize, c: usize) -> Result<DMatrix<f64>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch(format!("{name} must be {r}x{c}")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

struct Parsed {
    a: Vec<DMatrix<f64>>,
    chol: DMatrix<f64>,
}

impl DgpSpec {
    /// The bivariate rank-one system with `β = (1, -1)'` and
    /// `α = (-0.2, 0.2)'`.
    pub fn bivariate_example(t: usize, seed: u64) -> Self {
        DgpSpec {
            k: 2,
            rank: 1,
            alpha: vec![vec![-0.2], vec![0.2]],
            beta: vec![vec![1.0], vec![-1.0]],
            gamma: vec![],
            noise_cov: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            t,
            burn_in: 100,
            seed,
            names: None,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.parse().map(|_| ())
    }

    fn parse(&self) -> Result<Parsed> {
        let k = self.k;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if self.rank > k {
            return Err(Error::RankInvalid { rank: self.rank, k });
        }
        if self.t < 2 {
            return Err(Error::InvalidArgument("T must be at least 2".into()));
        }
        if let Some(n) = &self.names {
            if n.len() != k {
                return Err(Error::DimensionMismatch(format!("{} names for {k} variables", n.len())));
            }
        }
        let alpha = if self.rank == 0 {
            DMatrix::zeros(k, 0)
        } else {
            matrix("alpha", &self.alpha, k, self.rank)?
        };
        let beta = if self.rank == 0 {
            DMatrix::zeros(k, 0)
        } else {
            matrix("beta", &self.beta, k, self.rank)?
        };
        let gamma = self
            .gamma
            .iter()
            .enumerate()
            .map(|(i, g)| matrix(&format!("gamma[{i}]"), g, k, k))
            .collect::<Result<Vec<_>>>()?;
        let cov = matrix("noise_cov", &self.noise_cov, k, k)?;
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::InvalidArgument("noise_cov must be symmetric".into()));
        }
        let chol = cholesky_lower(&cov).ok_or(Error::CovarianceNotPd)?;

        let pi = &alpha * beta.transpose();
        let p = gamma.len() + 1;
        let mut a = Vec::with_capacity(p);
        let mut a1 = DMatrix::identity(k, k) + &pi;
        if let Some(g) = gamma.first() {
            a1 += g;
        }
        a.push(a1);
        for i in 1..gamma.len() {
            a.push(&gamma[i] - &gamma[i - 1]);
        }
        if let Some(g) = gamma.last() {
            a.push(-g);
        }
        check_stability(&a, k - self.rank)?;
        Ok(Parsed { a, chol })
    }
}

/// Companion eigenvalues must lie in the closed unit disk with exactly
/// `unit_roots` of them on the circle (all at `z = 1`).
fn check_stability(a: &[DMatrix<f64>], unit_roots: usize) -> Result<()> {
    let k = a[0].nrows();
    let p = a.len();
    let mut comp = DMatrix::zeros(k * p, k * p);
    for (i, ai) in a.iter().enumerate() {
        comp.view_mut((0, i * k), (k, k)).copy_from(ai);
    }
    for i in 0..k * (p - 1) {
        comp[(k + i, i)] = 1.0;
    }
    let eig = comp.complex_eigenvalues();
    let mut on_circle = 0;
    for z in eig.iter() {
        let m = z.norm();
        if m > 1.0 + UNIT_TOL {
            return Err(Error::UnstableSpec(format!("explosive root of modulus {m:.6}")));
        }
        if m >= 1.0 - UNIT_TOL {
            if (z.re - 1.0).abs() > UNIT_TOL.sqrt() || z.im.abs() > UNIT_TOL.sqrt() {
                return Err(Error::UnstableSpec(format!("root {z} on the unit circle away from 1")));
            }
            on_circle += 1;
        }
    }
    if on_circle != unit_roots {
        return Err(Error::UnstableSpec(format!(
            "{on_circle} unit roots, expected {unit_roots} for the given rank"
        )));
    }
    Ok(())
}

/// Simulates `burn_in + T` periods from zero initial conditions and keeps
/// the last `T`. Output columns are `y1..yk` unless names are given.
pub fn dgp_simulate(spec: &DgpSpec) -> Result<Frame> {
    let Parsed { a, chol } = spec.parse()?;
    let k = spec.k;
    let p = a.len();
    let total = spec.burn_in + spec.t;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // p zero rows of history, then the simulated path
    let mut y = DMatrix::<f64>::zeros(total + p, k);
    for t in p..total + p {
        let z = nalgebra::DVector::from_fn(k, |_, _| StandardNormal.sample(&mut rng));
        let mut next = &chol * z;
        for (i, ai) in a.iter().enumerate() {
            next += ai * y.row(t - i - 1).transpose();
        }
        y.set_row(t, &next.transpose());
    }
    let data = y.rows(p + spec.burn_in, spec.t).into_owned();
    let names = spec
        .names
        .clone()
        .unwrap_or_else(|| (1..=k).map(|i| format!("y{i}")).collect());
    let start = spec.start.unwrap_or(Period::new(2000, 1)?);
    Frame::new(names, start, data)
}
