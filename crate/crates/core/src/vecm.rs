//! Rank-restricted VECM: Johansen β, then α, Γ and deterministics by
//! least squares with β held fixed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::frame::{Frame, Period};
use crate::johansen::{design, residuals, solve, DetSpec, Residuals};
use crate::linalg::{hstack, singular_value_ratio, symmetrize};
use crate::matrix_serde;
use crate::regress::ols_multi;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Two-sided 95% normal quantile.
pub const Z_975: f64 = 1.959964;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefRow {
    pub name: String,
    pub estimate: f64,
    pub std_err: f64,
    #[serde(with = "matrix_serde::nan_as_null")]
    pub z: f64,
    #[serde(with = "matrix_serde::nan_as_null")]
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CoefRow {
    pub fn new(name: impl Into<String>, estimate: f64, std_err: f64) -> Self {
        let z = if std_err > 0.0 { estimate / std_err } else { f64::NAN };
        CoefRow {
            name: name.into(),
            estimate,
            std_err,
            z,
            p_value: erfc(z.abs() / std::f64::consts::SQRT_2),
            ci_low: estimate - Z_975 * std_err,
            ci_high: estimate + Z_975 * std_err,
        }
    }
}

/// Second-stage estimates for one equation of the differenced system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationInference {
    pub equation: String,
    /// Loadings on `ec1..ecr`.
    pub alpha: Vec<CoefRow>,
    /// `L{l}.{variable}` in lag-major order.
    pub gamma: Vec<CoefRow>,
    pub constant: Option<CoefRow>,
}

/// Free (non-normalized) entries of one cointegrating vector. Standard
/// errors use the asymptotic formula with α and Σ treated as known, so
/// they are approximate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaInference {
    pub vector: String,
    pub rows: Vec<CoefRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub equations: Vec<EquationInference>,
    pub beta: Vec<BetaInference>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// First period with a usable `ΔY_t`.
    pub start: Period,
    pub end: Period,
    pub n_obs_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmModel {
    pub schema_version: u32,
    pub names: Vec<String>,
    pub k: usize,
    pub rank: usize,
    pub lag_diff: usize,
    pub det_spec: DetSpec,
    /// `(k + c) x r`; a trailing `const` row under a restricted constant.
    #[serde(with = "matrix_serde")]
    pub beta: DMatrix<f64>,
    /// `k x r`.
    #[serde(with = "matrix_serde")]
    pub alpha: DMatrix<f64>,
    /// `Γ_1..Γ_{lag_diff}`, each `k x k`.
    #[serde(with = "matrix_serde::vec")]
    pub gamma: Vec<DMatrix<f64>>,
    /// Unrestricted intercept per equation.
    pub constant: Option<Vec<f64>>,
    /// `resid' resid / T_eff`.
    #[serde(with = "matrix_serde")]
    pub resid_cov: DMatrix<f64>,
    pub inference: Inference,
    pub sample: Sample,
}

impl VecmModel {
    /// Rows of β that multiply `Y_{t-1}`.
    pub fn beta_levels(&self) -> DMatrix<f64> {
        self.beta.rows(0, self.k).into_owned()
    }

    /// `Π = α β_levels'`.
    pub fn pi(&self) -> DMatrix<f64> {
        &self.alpha * self.beta_levels().transpose()
    }

    /// Intercept of the level representation: `α β_const' + μ`.
    pub fn level_intercept(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.k);
        if self.det_spec == DetSpec::RestrictedConstant {
            let bc = self.beta.row(self.k).transpose();
            c += &self.alpha * bc;
        }
        if let Some(mu) = &self.constant {
            c += DVector::from_column_slice(mu);
        }
        c
    }

    pub fn beta_row_names(&self) -> Vec<String> {
        let mut out = self.names.clone();
        if self.det_spec == DetSpec::RestrictedConstant {
            out.push("const".into());
        }
        out
    }

    fn check_names(&self, frame: &Frame) -> Result<()> {
        if frame.names() != self.names.as_slice() {
            return Err(Error::NameMismatch {
                expected: self.names.clone(),
                found: frame.names().to_vec(),
            });
        }
        Ok(())
    }
}

/// Error-correction terms `ec_{j,t} = β_j' (Y_{t-1}, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcSeries {
    pub start: Period,
    pub names: Vec<String>,
    /// `T_eff x r`.
    pub values: DMatrix<f64>,
}

/// `raw (top r x r block)^{-1}` with the top block set to the identity.
pub fn normalize_beta(raw: &DMatrix<f64>, r: usize) -> Result<DMatrix<f64>> {
    if r == 0 || r > raw.nrows() || r > raw.ncols() {
        return Err(Error::RankInvalid {
            rank: r,
            k: raw.nrows(),
        });
    }
    let raw = raw.columns(0, r).into_owned();
    let top = raw.rows(0, r).into_owned();
    if singular_value_ratio(&top) < 1e-12 {
        return Err(Error::SingularTopBlock);
    }
    let inv = top.try_inverse().ok_or(Error::SingularTopBlock)?;
    let mut out = raw * inv;
    for i in 0..r {
        for j in 0..r {
            out[(i, j)] = if i == j { 1.0 } else { 0.0 };
        }
    }
    Ok(out)
}

fn check_rank(rank: usize, k: usize) -> Result<()> {
    if rank == 0 || rank > k {
        return Err(Error::RankInvalid { rank, k });
    }
    Ok(())
}

pub fn fit_vecm(frame: &Frame, rank: usize, lag_diff: usize, det: DetSpec) -> Result<VecmModel> {
    check_rank(rank, frame.nvars())?;
    let res = residuals(frame, lag_diff, det)?;
    let (_, _, vectors) = solve(&res)?;
    let beta = normalize_beta(&vectors, rank)?;
    second_stage(frame, beta, lag_diff, det, &res)
}

/// Second stage only, with β supplied (e.g. a previously estimated one).
pub fn fit_vecm_with_beta(frame: &Frame, beta: &DMatrix<f64>, lag_diff: usize, det: DetSpec) -> Result<VecmModel> {
    let k = frame.nvars();
    let rank = beta.ncols();
    check_rank(rank, k)?;
    if beta.nrows() != k + det.restricted_rows() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} rows, expected {}",
            beta.nrows(),
            k + det.restricted_rows()
        )));
    }
    let res = residuals(frame, lag_diff, det)?;
    second_stage(frame, beta.clone(), lag_diff, det, &res)
}

fn second_stage(frame: &Frame, beta: DMatrix<f64>, lag_diff: usize, det: DetSpec, res: &Residuals) -> Result<VecmModel> {
    let k = frame.nvars();
    let r = beta.ncols();
    let names = frame.names().to_vec();
    let n = res.n();
    let ec = &res.z1 * &beta;
    let x = hstack(&[&ec, &res.z2]);
    let ls = ols_multi(&res.z0, &x)?;
    let has_const = det == DetSpec::UnrestrictedConstant;

    let alpha = DMatrix::from_fn(k, r, |i, j| ls.coef[(j, i)]);
    let gamma: Vec<DMatrix<f64>> = (0..lag_diff)
        .map(|l| DMatrix::from_fn(k, k, |i, v| ls.coef[(r + l * k + v, i)]))
        .collect();
    let constant = has_const.then(|| (0..k).map(|i| ls.coef[(r + lag_diff * k, i)]).collect());
    let mut resid_cov = ls.resid.transpose() * &ls.resid / n as f64;
    symmetrize(&mut resid_cov);

    let mut equations = Vec::with_capacity(k);
    for (i, name) in names.iter().enumerate() {
        let eq = ls.equation(i);
        let row = |idx: usize, label: String| CoefRow::new(label, eq.coef[idx], eq.std_err[idx]);
        let alpha_rows = (0..r).map(|j| row(j, format!("ec{}", j + 1))).collect();
        let mut gamma_rows = Vec::with_capacity(lag_diff * k);
        for l in 0..lag_diff {
            for (v, vn) in names.iter().enumerate() {
                gamma_rows.push(row(r + l * k + v, format!("L{}.{}", l + 1, vn)));
            }
        }
        equations.push(EquationInference {
            equation: name.clone(),
            alpha: alpha_rows,
            gamma: gamma_rows,
            constant: has_const.then(|| row(r + lag_diff * k, "const".into())),
        });
    }

    let mut row_names = names.clone();
    if det == DetSpec::RestrictedConstant {
        row_names.push("const".into());
    }
    let beta_inf = beta_inference(&beta, &alpha, &resid_cov, &res.r1, &row_names)?;

    let start = frame.start().add_months((lag_diff + 1) as i64);
    Ok(VecmModel {
        schema_version: MODEL_SCHEMA_VERSION,
        names,
        k,
        rank: r,
        lag_diff,
        det_spec: det,
        beta,
        alpha,
        gamma,
        constant,
        resid_cov,
        inference: Inference {
            equations,
            beta: beta_inf,
        },
        sample: Sample {
            start,
            end: frame.end(),
            n_obs_effective: n,
        },
    })
}

/// `Var(β_ij) = [(R12'R12)^{-1}]_ii [(α'Σ^{-1}α)^{-1}]_jj` for the rows
/// below the identity block, `R12` being those columns of `R1`.
fn beta_inference(
    beta: &DMatrix<f64>,
    alpha: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    r1: &DMatrix<f64>,
    row_names: &[String],
) -> Result<Vec<BetaInference>> {
    let r = beta.ncols();
    let free = beta.nrows() - r;
    let mut out: Vec<BetaInference> = (0..r)
        .map(|j| BetaInference {
            vector: format!("beta{}", j + 1),
            rows: Vec::with_capacity(free),
        })
        .collect();
    if free == 0 {
        return Ok(out);
    }
    let r12 = r1.columns(r, free).into_owned();
    let a = (r12.transpose() * &r12)
        .try_inverse()
        .ok_or(Error::SingularMoment("S11"))?;
    let sigma_inv = sigma.clone().try_inverse().ok_or(Error::SingularCovariance)?;
    let b = (alpha.transpose() * sigma_inv * alpha)
        .try_inverse()
        .ok_or(Error::SingularCovariance)?;
    for (j, col) in out.iter_mut().enumerate() {
        for i in 0..free {
            let se = (a[(i, i)] * b[(j, j)]).max(0.0).sqrt();
            col.rows.push(CoefRow::new(row_names[r + i].clone(), beta[(r + i, j)], se));
        }
    }
    Ok(out)
}

pub fn ec_terms(model: &VecmModel, frame: &Frame) -> Result<EcSeries> {
    model.check_names(frame)?;
    let (_, z1, _) = design(frame, model.lag_diff, model.det_spec)?;
    Ok(EcSeries {
        start: frame.start().add_months((model.lag_diff + 1) as i64),
        names: (1..=model.rank).map(|j| format!("ec{j}")).collect(),
        values: z1 * &model.beta,
    })
}

/// Fitted `ΔY_t` of `model` over the usable sample of `frame`.
pub fn fitted_differences(model: &VecmModel, frame: &Frame) -> Result<DMatrix<f64>> {
    model.check_names(frame)?;
    let (_, z1, z2) = design(frame, model.lag_diff, model.det_spec)?;
    let k = model.k;
    let mut fit = z1 * &model.beta * model.alpha.transpose();
    for (l, g) in model.gamma.iter().enumerate() {
        fit += z2.columns(l * k, k) * g.transpose();
    }
    if let Some(mu) = &model.constant {
        for mut row in fit.row_iter_mut() {
            for (j, m) in mu.iter().enumerate() {
                row[j] += m;
            }
        }
    }
    Ok(fit)
}

/// `ΔY_t` minus the fitted values.
pub fn vecm_residuals(model: &VecmModel, frame: &Frame) -> Result<DMatrix<f64>> {
    let fit = fitted_differences(model, frame)?;
    let (z0, _, _) = design(frame, model.lag_diff, model.det_spec)?;
    Ok(z0 - fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalize_diagonal_example() {
        let raw = DMatrix::from_row_slice(3, 2, &[2.0, 0.0, 0.0, 4.0, 6.0, 8.0]);
        let b = normalize_beta(&raw, 2).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 3.0, 2.0]));
    }

    #[test]
    fn normalize_singular_top() {
        let raw = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 1.0, 1.0]);
        assert!(matches!(normalize_beta(&raw, 2), Err(Error::SingularTopBlock)));
    }

    #[test]
    fn normalize_sets_exact_identity() {
        let raw = DMatrix::from_row_slice(3, 2, &[0.3, 0.7, 0.1, -0.9, 2.0, 5.0]);
        let b = normalize_beta(&raw, 2).unwrap();
        assert_eq!(b[(0, 1)], 0.0);
        assert_eq!(b[(1, 0)], 0.0);
        assert_eq!(b[(0, 0)], 1.0);
        // same column space
        let top_inv = raw.rows(0, 2).into_owned().try_inverse().unwrap();
        assert_abs_diff_eq!(b.row(2).into_owned(), (raw * top_inv).row(2).into_owned(), epsilon = 1e-12);
    }

    #[test]
    fn coef_row_consistency() {
        let c = CoefRow::new("x", 0.5, 0.25);
        assert_eq!(c.z, 2.0);
        assert_abs_diff_eq!(c.p_value, 0.0455, epsilon = 1e-4);
        assert!(c.ci_low < c.estimate && c.estimate < c.ci_high);
        let z = CoefRow::new("fixed", 1.0, 0.0);
        assert!(z.z.is_nan());
    }
}
