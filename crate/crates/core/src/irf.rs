//! Level-VAR form of a fitted VECM, orthogonalized impulse responses and
//! residual-bootstrap bands.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::cholesky_lower;
use crate::matrix_serde;
use crate::vecm::{fit_vecm, vecm_residuals, VecmModel};

pub const DEFAULT_HORIZON: usize = 24;
pub const DEFAULT_N_BOOT: usize = 999;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const BAND_METHOD: &str = "hall_percentile";

/// `A_1..A_p` with `p = lag_diff + 1`.
pub fn to_level_var(model: &VecmModel) -> Vec<DMatrix<f64>> {
    let k = model.k;
    let p = model.lag_diff + 1;
    let g = &model.gamma;
    let mut a = Vec::with_capacity(p);
    let mut a1 = DMatrix::identity(k, k) + model.pi();
    if p > 1 {
        a1 += &g[0];
    }
    a.push(a1);
    for i in 2..p {
        a.push(&g[i - 1] - &g[i - 2]);
    }
    if p > 1 {
        a.push(-&g[p - 2]);
    }
    a
}

/// MA coefficients `Ψ_0..Ψ_H` of the VAR with coefficients `a`.
pub fn ma_coefficients(a: &[DMatrix<f64>], horizon: usize) -> Vec<DMatrix<f64>> {
    let k = a.first().map(|m| m.nrows()).unwrap_or(0);
    let mut psi = vec![DMatrix::identity(k, k)];
    for h in 1..=horizon {
        let mut acc = DMatrix::zeros(k, k);
        for (i, ai) in a.iter().enumerate().take(h) {
            acc += &psi[h - i - 1] * ai;
        }
        psi.push(acc);
    }
    psi
}

/// `point[h] = Ψ_h P` with `P` the lower Cholesky factor of Σ̂.
pub fn irf_point(model: &VecmModel, horizon: usize) -> Result<Vec<DMatrix<f64>>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let p = cholesky_lower(&model.resid_cov).ok_or(Error::CovarianceNotPd)?;
    Ok(ma_coefficients(&to_level_var(model), horizon)
        .into_iter()
        .map(|psi| psi * &p)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub horizon: usize,
    /// Cholesky ordering; also the response/impulse labels.
    pub ordering: Vec<String>,
    /// `point[h][(i, j)]`: response of `i` at `h` to a 1σ shock in `j`.
    #[serde(with = "matrix_serde::vec")]
    pub point: Vec<DMatrix<f64>>,
    #[serde(with = "matrix_serde::vec")]
    pub band_low: Vec<DMatrix<f64>>,
    #[serde(with = "matrix_serde::vec")]
    pub band_high: Vec<DMatrix<f64>>,
    pub level: f64,
    pub n_boot: usize,
    pub seed: u64,
    pub method: String,
    pub failed_replications: usize,
}

/// One line of the flat plot-data table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfRow {
    pub horizon: usize,
    pub impulse: String,
    pub response: String,
    pub point: f64,
    pub low: f64,
    pub high: f64,
}

impl IrfResult {
    pub fn rows(&self) -> Vec<IrfRow> {
        let k = self.ordering.len();
        let mut out = Vec::with_capacity((self.horizon + 1) * k * k);
        for h in 0..=self.horizon {
            for j in 0..k {
                for i in 0..k {
                    out.push(IrfRow {
                        horizon: h,
                        impulse: self.ordering[j].clone(),
                        response: self.ordering[i].clone(),
                        point: self.point[h][(i, j)],
                        low: self.band_low[h][(i, j)],
                        high: self.band_high[h][(i, j)],
                    });
                }
            }
        }
        out
    }
}

/// Random stream for replication `b`: the master seed selects the key and
/// `b` the stream, so draws do not depend on scheduling.
pub fn replication_rng(seed: u64, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64);
    rng
}

/// Regenerates levels from the first `p` observations of `frame` using the
/// level VAR of `model` and the rows of `resid` drawn by index.
fn regenerate(
    frame: &Frame,
    a: &[DMatrix<f64>],
    c: &DVector<f64>,
    resid: &DMatrix<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Frame> {
    let (t_len, k) = (frame.nobs(), frame.nvars());
    let p = a.len();
    let n = resid.nrows();
    let mut y = DMatrix::zeros(t_len, k);
    y.rows_mut(0, p).copy_from(&frame.data().rows(0, p));
    for t in p..t_len {
        let draw = rng.random_range(0..n);
        let mut next = c + resid.row(draw).transpose();
        for (i, ai) in a.iter().enumerate() {
            next += ai * y.row(t - i - 1).transpose();
        }
        y.set_row(t, &next.transpose());
    }
    Frame::new(frame.names().to_vec(), frame.start(), y)
}

/// Type-7 sample quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Recursive-design residual bootstrap with Hall percentile bands.
pub fn irf_bootstrap(
    model: &VecmModel,
    frame: &Frame,
    horizon: usize,
    n_boot: usize,
    seed: u64,
    level: f64,
) -> Result<IrfResult> {
    if n_boot < 99 {
        return Err(Error::InvalidArgument(format!("n_boot must be at least 99, got {n_boot}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must lie in (0, 1), got {level}")));
    }
    let point = irf_point(model, horizon)?;
    let mut resid = vecm_residuals(model, frame)?;
    let means = resid.row_mean();
    for mut row in resid.row_iter_mut() {
        row -= &means;
    }
    let a = to_level_var(model);
    let c = model.level_intercept();

    let draws: Vec<Option<Vec<DMatrix<f64>>>> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = replication_rng(seed, b);
            let star = regenerate(frame, &a, &c, &resid, &mut rng).ok()?;
            let m = fit_vecm(&star, model.rank, model.lag_diff, model.det_spec).ok()?;
            irf_point(&m, horizon).ok()
        })
        .collect();
    let failed = draws.iter().filter(|d| d.is_none()).count();
    if failed * 10 > n_boot {
        return Err(Error::BootstrapRefitFailure {
            failed,
            total: n_boot,
        });
    }
    let ok: Vec<&Vec<DMatrix<f64>>> = draws.iter().flatten().collect();

    let k = model.k;
    let tail = (1.0 - level) / 2.0;
    let mut band_low = Vec::with_capacity(horizon + 1);
    let mut band_high = Vec::with_capacity(horizon + 1);
    let mut buf = Vec::with_capacity(ok.len());
    for (h, ph) in point.iter().enumerate() {
        let mut lo = DMatrix::zeros(k, k);
        let mut hi = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                buf.clear();
                buf.extend(ok.iter().map(|d| d[h][(i, j)]));
                buf.sort_by(f64::total_cmp);
                let q_lo = quantile(&buf, tail);
                let q_hi = quantile(&buf, 1.0 - tail);
                lo[(i, j)] = 2.0 * ph[(i, j)] - q_hi;
                hi[(i, j)] = 2.0 * ph[(i, j)] - q_lo;
            }
        }
        band_low.push(lo);
        band_high.push(hi);
    }
    Ok(IrfResult {
        horizon,
        ordering: model.names.clone(),
        point,
        band_low,
        band_high,
        level,
        n_boot,
        seed,
        method: BAND_METHOD.into(),
        failed_replications: failed,
    })
}
