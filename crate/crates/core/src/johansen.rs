//! Johansen reduced-rank regression and the trace test.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{column_norms, hstack, singular_value_ratio, symmetrize};
use crate::matrix_serde;
use crate::regress::ols_multi;

/// Deterministic terms in the error-correction model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetSpec {
    None,
    /// Constant only inside the cointegrating relations.
    RestrictedConstant,
    /// Constant in every equation of the differenced system.
    UnrestrictedConstant,
}

impl DetSpec {
    /// Rows appended to `Y_{t-1}` in the cointegrating space.
    pub fn restricted_rows(self) -> usize {
        usize::from(self == DetSpec::RestrictedConstant)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetSpec::None => "none",
            DetSpec::RestrictedConstant => "restricted_constant",
            DetSpec::UnrestrictedConstant => "unrestricted_constant",
        }
    }
}

impl std::str::FromStr for DetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DetSpec::None),
            "restricted_constant" => Ok(DetSpec::RestrictedConstant),
            "unrestricted_constant" => Ok(DetSpec::UnrestrictedConstant),
            _ => Err(Error::InvalidArgument(format!("unknown deterministic spec `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceCritValues {
    #[serde(rename = "90%")]
    pub p90: f64,
    #[serde(rename = "95%")]
    pub p95: f64,
    #[serde(rename = "99%")]
    pub p99: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentMatrices {
    #[serde(with = "matrix_serde")]
    pub s00: DMatrix<f64>,
    #[serde(with = "matrix_serde")]
    pub s01: DMatrix<f64>,
    #[serde(with = "matrix_serde")]
    pub s10: DMatrix<f64>,
    #[serde(with = "matrix_serde")]
    pub s11: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JohansenResult {
    pub names: Vec<String>,
    /// Descending, one per variable.
    pub eigenvalues: Vec<f64>,
    /// `trace_stats[r]` tests `rank <= r`.
    pub trace_stats: Vec<f64>,
    pub crit_values_95: Vec<f64>,
    pub det_spec: DetSpec,
    pub lag_diff: usize,
    pub n_obs_effective: usize,
    pub selected_rank: usize,
    /// Columns paired with `eigenvalues`; one extra row for a restricted
    /// constant. Normalized so that `V' S11 V = I`.
    #[serde(with = "matrix_serde")]
    pub eigenvectors: DMatrix<f64>,
    pub moments: MomentMatrices,
}

impl JohansenResult {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Residuals of `ΔY_t` and `Y_{t-1}` after partialling out lagged
/// differences and unrestricted deterministics.
#[derive(Debug, Clone)]
pub(crate) struct Residuals {
    pub r0: DMatrix<f64>,
    pub r1: DMatrix<f64>,
    /// `ΔY_t`, `T_eff x k`.
    pub z0: DMatrix<f64>,
    /// `Y_{t-1}` (with a trailing 1 under a restricted constant).
    pub z1: DMatrix<f64>,
    /// Lagged differences then the unrestricted constant, if any.
    pub z2: DMatrix<f64>,
}

impl Residuals {
    pub fn n(&self) -> usize {
        self.r0.nrows()
    }
}

/// Checks the sample-size condition shared with the VECM.
pub(crate) fn check_sample(t_len: usize, k: usize, lag_diff: usize) -> Result<()> {
    let needed = k * lag_diff + k + 1;
    let avail = t_len.saturating_sub(lag_diff + 1);
    if avail <= needed {
        return Err(Error::TooShort {
            needed: needed + lag_diff + 1,
            available: t_len,
        });
    }
    Ok(())
}

/// Regressor blocks for the usable sample `t = lag_diff+1 .. T-1`.
pub(crate) fn design(frame: &Frame, lag_diff: usize, det: DetSpec) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let k = frame.nvars();
    check_sample(frame.nobs(), k, lag_diff)?;
    let y = frame.data();
    let n = frame.nobs() - lag_diff - 1;
    let dy = |s: usize, j: usize| y[(s, j)] - y[(s - 1, j)];
    let first = lag_diff + 1;
    let z0 = DMatrix::from_fn(n, k, |t, j| dy(first + t, j));
    let c1 = det.restricted_rows();
    let z1 = DMatrix::from_fn(n, k + c1, |t, j| if j < k { y[(first + t - 1, j)] } else { 1.0 });
    let c2 = usize::from(det == DetSpec::UnrestrictedConstant);
    let z2 = DMatrix::from_fn(n, k * lag_diff + c2, |t, j| {
        if j < k * lag_diff {
            let (l, v) = (j / k + 1, j % k);
            dy(first + t - l, v)
        } else {
            1.0
        }
    });
    Ok((z0, z1, z2))
}

pub(crate) fn residuals(frame: &Frame, lag_diff: usize, det: DetSpec) -> Result<Residuals> {
    let (z0, z1, z2) = design(frame, lag_diff, det)?;
    let (r0, r1) = if z2.ncols() == 0 {
        (z0.clone(), z1.clone())
    } else {
        let both = hstack(&[&z0, &z1]);
        let fit = ols_multi(&both, &z2)?;
        let k = z0.ncols();
        (
            fit.resid.columns(0, k).into_owned(),
            fit.resid.columns(k, z1.ncols()).into_owned(),
        )
    };
    Ok(Residuals { r0, r1, z0, z1, z2 })
}

const SINGULAR_MOMENT: f64 = 1e-12;

fn scaled(m: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / (d[i] * d[j]))
}

/// Moment matrices and the eigen-solution of
/// `det(λ S11 - S10 S00^{-1} S01) = 0`.
pub(crate) fn solve(res: &Residuals) -> Result<(MomentMatrices, Vec<f64>, DMatrix<f64>)> {
    let n = res.n() as f64;
    let mut s00 = res.r0.transpose() * &res.r0 / n;
    let s01 = res.r0.transpose() * &res.r1 / n;
    let mut s11 = res.r1.transpose() * &res.r1 / n;
    symmetrize(&mut s00);
    symmetrize(&mut s11);
    let s10 = s01.transpose();

    // Equilibrate so the singularity checks and the Cholesky factor do not
    // depend on the units of each series.
    let d0: Vec<f64> = column_norms(&res.r0).iter().map(|v| v / n.sqrt()).collect();
    let d1: Vec<f64> = column_norms(&res.r1).iter().map(|v| v / n.sqrt()).collect();
    if d0.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::SingularMoment("S00"));
    }
    if d1.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::SingularMoment("S11"));
    }
    let s00s = scaled(&s00, &d0);
    let s11s = scaled(&s11, &d1);
    let s01s = DMatrix::from_fn(s01.nrows(), s01.ncols(), |i, j| s01[(i, j)] / (d0[i] * d1[j]));
    if singular_value_ratio(&s00s) < SINGULAR_MOMENT {
        return Err(Error::SingularMoment("S00"));
    }
    if singular_value_ratio(&s11s) < SINGULAR_MOMENT {
        return Err(Error::SingularMoment("S11"));
    }
    let chol00 = s00s.clone().cholesky().ok_or(Error::SingularMoment("S00"))?;
    let l = s11s.clone().cholesky().ok_or(Error::SingularMoment("S11"))?.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMoment("S11"))?;
    let a = chol00.solve(&s01s);
    let mut m = &linv * s01s.transpose() * a * linv.transpose();
    symmetrize(&mut m);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let k = res.r0.ncols();
    let dim = res.r1.ncols();
    let back = linv.transpose();
    let mut values = Vec::with_capacity(k);
    let mut vectors = DMatrix::zeros(dim, k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        values.push(eig.eigenvalues[idx].clamp(0.0, 1.0 - 1e-12));
        let u = eig.eigenvectors.column(idx);
        let v = &back * u;
        for i in 0..dim {
            vectors[(i, c)] = v[i] / d1[i];
        }
    }
    Ok((MomentMatrices { s00, s01, s10, s11 }, values, vectors))
}

/// Trace statistics `-T Σ_{i>r} ln(1 - λ_i)` for `r = 0..k-1`.
pub fn trace_statistics(eigenvalues: &[f64], n_obs: usize) -> Vec<f64> {
    let k = eigenvalues.len();
    let t = n_obs as f64;
    (0..k)
        .map(|r| -t * eigenvalues[r..].iter().map(|l| (1.0 - l).ln()).sum::<f64>())
        .collect()
}

pub fn johansen(frame: &Frame, lag_diff: usize, det: DetSpec) -> Result<JohansenResult> {
    let k = frame.nvars();
    let res = residuals(frame, lag_diff, det)?;
    let (moments, eigenvalues, eigenvectors) = solve(&res)?;
    let n = res.n();
    let trace_stats = trace_statistics(&eigenvalues, n);
    let crit_values_95 = (0..k)
        .map(|r| trace_critvals(k - r, det).map(|c| c.p95))
        .collect::<Result<Vec<_>>>()?;
    let selected_rank = first_non_rejection(&trace_stats, &crit_values_95);
    Ok(JohansenResult {
        names: frame.names().to_vec(),
        eigenvalues,
        trace_stats,
        crit_values_95,
        det_spec: det,
        lag_diff,
        n_obs_effective: n,
        selected_rank,
        eigenvectors,
        moments,
    })
}

fn first_non_rejection(stats: &[f64], cvs: &[f64]) -> usize {
    stats
        .iter()
        .zip(cvs)
        .position(|(s, c)| s < c)
        .unwrap_or(stats.len())
}

/// Sequential trace testing from `r = 0`; an override replaces the
/// data-driven choice.
pub fn select_rank(result: &JohansenResult, override_rank: Option<usize>) -> Result<usize> {
    let k = result.k();
    match override_rank {
        Some(r) if r > k => Err(Error::RankInvalid { rank: r, k }),
        Some(r) => Ok(r),
        None => Ok(first_non_rejection(&result.trace_stats, &result.crit_values_95)),
    }
}

#[derive(Deserialize)]
struct CvTable {
    max_k_minus_r: usize,
    cases: std::collections::HashMap<DetSpec, Vec<[f64; 3]>>,
}

static CV_TABLE: OnceLock<CvTable> = OnceLock::new();

fn cv_table() -> &'static CvTable {
    CV_TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("../data/johansen_trace_cv.json"))
            .expect("embedded critical-value table is valid")
    })
}

/// Asymptotic trace-test critical values for `k - r` common stochastic
/// trends.
pub fn trace_critvals(k_minus_r: usize, det: DetSpec) -> Result<TraceCritValues> {
    let table = cv_table();
    if k_minus_r == 0 || k_minus_r > table.max_k_minus_r {
        return Err(Error::OutOfTableRange(k_minus_r));
    }
    let row = table.cases[&det][k_minus_r - 1];
    Ok(TraceCritValues {
        p90: row[0],
        p95: row[1],
        p99: row[2],
    })
}
