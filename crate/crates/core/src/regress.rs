//! Least squares, unrestricted VARs, Gaussian log-likelihood and
//! information criteria.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{lag_matrix, Frame};
use crate::linalg::{column_norms, hstack, log_det_spd, singular_value_ratio, symmetrize};

/// Singular value ratio below which a (column-equilibrated) design is
/// treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Single-equation least-squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: DVector<f64>,
    pub std_err: DVector<f64>,
    /// `coef / std_err`; NaN where the standard error is zero.
    pub t_stat: DVector<f64>,
    pub resid: DVector<f64>,
    /// `SSR / (n - m)`.
    pub sigma2: f64,
    pub n_obs: usize,
    pub n_params: usize,
}

/// Least squares of several regressands on one shared design matrix.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// `m x q`, one column per regressand.
    pub coef: DMatrix<f64>,
    /// `n x q`.
    pub resid: DMatrix<f64>,
    /// `(X'X)^{-1}`.
    pub xtx_inv: DMatrix<f64>,
    pub n_obs: usize,
    pub n_params: usize,
}

impl LeastSquares {
    pub fn ssr(&self, eq: usize) -> f64 {
        self.resid.column(eq).norm_squared()
    }

    pub fn sigma2(&self, eq: usize) -> f64 {
        self.ssr(eq) / (self.n_obs - self.n_params) as f64
    }

    pub fn equation(&self, eq: usize) -> OlsFit {
        let sigma2 = self.sigma2(eq);
        let coef = self.coef.column(eq).into_owned();
        let std_err = DVector::from_fn(self.n_params, |i, _| (sigma2 * self.xtx_inv[(i, i)]).max(0.0).sqrt());
        let t_stat = DVector::from_fn(self.n_params, |i, _| {
            if std_err[i] > 0.0 {
                coef[i] / std_err[i]
            } else {
                f64::NAN
            }
        });
        OlsFit {
            coef,
            std_err,
            t_stat,
            resid: self.resid.column(eq).into_owned(),
            sigma2,
            n_obs: self.n_obs,
            n_params: self.n_params,
        }
    }
}

/// Least squares via Householder QR of the column-equilibrated design.
///
/// Rank is judged on the equilibrated matrix, so the check does not depend
/// on the units of the regressors.
pub fn ols_multi(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<LeastSquares> {
    let (n, m) = (x.nrows(), x.ncols());
    if y.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} observations in y, {} rows in X",
            y.nrows(),
            n
        )));
    }
    if m == 0 {
        return Err(Error::DimensionMismatch("design matrix has no columns".into()));
    }
    if n <= m {
        return Err(Error::TooShort {
            needed: m,
            available: n,
        });
    }
    let norms = column_norms(x);
    if let Some(j) = norms.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::RankDeficient { column: j });
    }
    let mut xs = x.clone();
    for (j, mut col) in xs.column_iter_mut().enumerate() {
        col /= norms[j];
    }
    let qr = xs.qr();
    let r = qr.r();
    if singular_value_ratio(&r) < RANK_TOLERANCE {
        return Err(Error::RankDeficient {
            column: first_dependent_column(&r),
        });
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let top = qty.rows(0, m).into_owned();
    let mut coef = r
        .solve_upper_triangular(&top)
        .ok_or(Error::RankDeficient { column: m - 1 })?;
    for (i, mut row) in coef.row_iter_mut().enumerate() {
        row /= norms[i];
    }
    let resid = y - x * &coef;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(m, m))
        .ok_or(Error::RankDeficient { column: m - 1 })?;
    let mut xtx_inv = &r_inv * r_inv.transpose();
    for i in 0..m {
        for j in 0..m {
            xtx_inv[(i, j)] /= norms[i] * norms[j];
        }
    }
    symmetrize(&mut xtx_inv);
    Ok(LeastSquares {
        coef,
        resid,
        xtx_inv,
        n_obs: n,
        n_params: m,
    })
}

fn first_dependent_column(r: &DMatrix<f64>) -> usize {
    let m = r.ncols();
    (0..m)
        .find(|&j| singular_value_ratio(&r.view((0, 0), (j + 1, j + 1)).into_owned()) < RANK_TOLERANCE)
        .unwrap_or(m - 1)
}

pub fn ols(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<OlsFit> {
    let ym = DMatrix::from_column_slice(y.len(), 1, y.as_slice());
    Ok(ols_multi(&ym, x)?.equation(0))
}

/// Unrestricted VAR(p) estimated equation by equation.
#[derive(Debug, Clone)]
pub struct VarFit {
    pub lag_order: usize,
    /// `A_1..A_p`; row `i` of `A_l` is equation `i`.
    pub coefs: Vec<DMatrix<f64>>,
    pub intercept: Option<DVector<f64>>,
    /// `resid' resid / n_obs`.
    pub resid_cov: DMatrix<f64>,
    pub loglik: f64,
    pub n_obs: usize,
    pub resid: DMatrix<f64>,
    pub fitted: DMatrix<f64>,
    pub ls: LeastSquares,
}

impl VarFit {
    pub fn k(&self) -> usize {
        self.resid_cov.nrows()
    }

    pub fn params_per_equation(&self) -> usize {
        self.k() * self.lag_order + usize::from(self.intercept.is_some())
    }
}

pub fn fit_var(frame: &Frame, p: usize, intercept: bool) -> Result<VarFit> {
    fit_var_on_sample(frame, p, intercept, p)
}

/// VAR(p) using only observations `presample+1..T`, so that fits of
/// different orders share one estimation sample.
pub fn fit_var_on_sample(frame: &Frame, p: usize, intercept: bool, presample: usize) -> Result<VarFit> {
    if presample < p {
        return Err(Error::InvalidArgument(format!(
            "presample {presample} shorter than lag order {p}"
        )));
    }
    let k = frame.nvars();
    let t_len = frame.nobs();
    let m = k * p + usize::from(intercept);
    if t_len <= presample || t_len - presample <= m {
        return Err(Error::TooShort {
            needed: presample + m,
            available: t_len,
        });
    }
    let (y, x) = lag_matrix(frame, p)?;
    let skip = presample - p;
    let n = y.nrows() - skip;
    let y = y.rows(skip, n).into_owned();
    let x = x.rows(skip, n).into_owned();
    let x = if intercept { hstack(&[&x, &DMatrix::from_element(n, 1, 1.0)]) } else { x };
    let ls = ols_multi(&y, &x)?;
    let coefs = (0..p)
        .map(|l| DMatrix::from_fn(k, k, |i, j| ls.coef[(l * k + j, i)]))
        .collect();
    let intercept = intercept.then(|| DVector::from_fn(k, |i, _| ls.coef[(k * p, i)]));
    let mut resid_cov = ls.resid.transpose() * &ls.resid / n as f64;
    symmetrize(&mut resid_cov);
    let loglik = gaussian_loglik(&resid_cov, n);
    Ok(VarFit {
        lag_order: p,
        coefs,
        intercept,
        resid_cov,
        loglik,
        n_obs: n,
        resid: ls.resid.clone(),
        fitted: &y - &ls.resid,
        ls,
    })
}

/// Concentrated Gaussian log-likelihood `-(n/2)(k ln 2pi + ln det S + k)`;
/// `+inf` for a singular residual covariance.
pub fn gaussian_loglik(resid_cov: &DMatrix<f64>, n: usize) -> f64 {
    let k = resid_cov.nrows() as f64;
    match log_det_spd(resid_cov) {
        Some(ld) => -(n as f64) / 2.0 * (k * (2.0 * PI).ln() + ld + k),
        None => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoCriteria {
    pub aic: f64,
    pub sic: f64,
    pub hqic: f64,
}

/// Per-observation criteria from `ln det` of the residual covariance,
/// `n_params` estimated coefficients in total and `n` observations.
pub fn criteria_from_logdet(log_det: f64, n_params: usize, n: usize) -> InfoCriteria {
    let m = n_params as f64;
    let nf = n as f64;
    InfoCriteria {
        aic: log_det + 2.0 * m / nf,
        sic: log_det + m * nf.ln() / nf,
        hqic: log_det + 2.0 * m * nf.ln().ln() / nf,
    }
}

pub fn info_criteria(fit: &VarFit) -> Result<InfoCriteria> {
    let ld = log_det_spd(&fit.resid_cov).ok_or(Error::SingularCovariance)?;
    Ok(criteria_from_logdet(ld, fit.params_per_equation() * fit.k(), fit.n_obs))
}
