//! Augmented Dickey-Fuller test with MacKinnon critical values and
//! p-values.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::frame::Series;
use crate::regress::ols;

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regression {
    None,
    Constant,
    ConstantTrend,
}

impl Regression {
    fn n_terms(self) -> usize {
        match self {
            Regression::None => 0,
            Regression::Constant => 1,
            Regression::ConstantTrend => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagChoice {
    Fixed(usize),
    /// Minimize the Schwarz criterion over `0..=max_lag`.
    AutoSic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub pct1: f64,
    #[serde(rename = "5%")]
    pub pct5: f64,
    #[serde(rename = "10%")]
    pub pct10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub used_lag: usize,
    pub max_lag: usize,
    pub n_obs_effective: usize,
    pub crit_values: CriticalValues,
    pub regression: Regression,
    pub reject_at_5pct: bool,
}

/// Minimum number of usable observations in the test regression.
pub const MIN_EFFECTIVE_OBS: usize = 20;

// MacKinnon (2010) response surfaces for one I(1) variable: rows are the
// 1%, 5%, 10% levels, columns the coefficients on 1, 1/n, 1/n^2, 1/n^3.
const CRIT_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const CRIT_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CRIT_CONSTANT_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// MacKinnon (1994) asymptotic distribution: the p-value is
/// `Phi(poly(stat))`, with a quadratic below `star` and a cubic above it.
struct PvalueSurface {
    min: f64,
    max: f64,
    star: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const PV_NONE: PvalueSurface = PvalueSurface {
    min: -19.04,
    max: f64::INFINITY,
    star: -1.04,
    small: [0.6344, 1.2378, 3.2496e-2],
    large: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
};
const PV_CONSTANT: PvalueSurface = PvalueSurface {
    min: -18.83,
    max: 2.74,
    star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const PV_CONSTANT_TREND: PvalueSurface = PvalueSurface {
    min: -16.18,
    max: 0.7,
    star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

fn horner(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn mackinnon_critvals(regression: Regression, n_obs: usize) -> CriticalValues {
    let table = match regression {
        Regression::None => &CRIT_NONE,
        Regression::Constant => &CRIT_CONSTANT,
        Regression::ConstantTrend => &CRIT_CONSTANT_TREND,
    };
    let inv = 1.0 / n_obs as f64;
    let cv = |row: &[f64; 4]| horner(row, inv);
    CriticalValues {
        pct1: cv(&table[0]),
        pct5: cv(&table[1]),
        pct10: cv(&table[2]),
    }
}

/// Asymptotic critical values (`n -> inf`).
pub fn mackinnon_critvals_asymptotic(regression: Regression) -> CriticalValues {
    let table = match regression {
        Regression::None => &CRIT_NONE,
        Regression::Constant => &CRIT_CONSTANT,
        Regression::ConstantTrend => &CRIT_CONSTANT_TREND,
    };
    CriticalValues {
        pct1: table[0][0],
        pct5: table[1][0],
        pct10: table[2][0],
    }
}

pub fn mackinnon_pvalue(statistic: f64, regression: Regression) -> f64 {
    let s = match regression {
        Regression::None => &PV_NONE,
        Regression::Constant => &PV_CONSTANT,
        Regression::ConstantTrend => &PV_CONSTANT_TREND,
    };
    if statistic > s.max {
        return 1.0;
    }
    if statistic < s.min {
        return 0.0;
    }
    let z = if statistic <= s.star {
        horner(&s.small, statistic)
    } else {
        horner(&s.large, statistic)
    };
    Normal::standard().cdf(z).clamp(0.0, 1.0)
}

/// `floor(12 (T/100)^{1/4})`.
pub fn default_max_lag(n_obs: usize) -> usize {
    (12.0 * (n_obs as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Regression of `dy_t` on `[y_{t-1}, dy_{t-1..t-lag}, deterministics]`
/// over difference indices `start..`.
fn adf_design(y: &[f64], lag: usize, start: usize, regression: Regression) -> (DVector<f64>, DMatrix<f64>) {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let n = dy.len() - start;
    let m = 1 + lag + regression.n_terms();
    let target = DVector::from_fn(n, |i, _| dy[start + i]);
    let x = DMatrix::from_fn(n, m, |i, c| {
        let s = start + i;
        if c == 0 {
            y[s]
        } else if c <= lag {
            dy[s - c]
        } else if c == lag + 1 {
            1.0
        } else {
            (s + 1) as f64
        }
    });
    (target, x)
}

pub fn adf(series: &Series, regression: Regression, max_lag: Option<usize>, lag_choice: LagChoice) -> Result<AdfResult> {
    adf_values(series.values(), regression, max_lag, lag_choice)
}

pub fn adf_values(y: &[f64], regression: Regression, max_lag: Option<usize>, lag_choice: LagChoice) -> Result<AdfResult> {
    let n_diff = y.len().saturating_sub(1);
    let max_lag = max_lag.unwrap_or_else(|| default_max_lag(y.len()));
    let too_short = |lag: usize| Error::TooShort {
        needed: MIN_EFFECTIVE_OBS + lag,
        available: n_diff,
    };
    let used_lag = match lag_choice {
        LagChoice::Fixed(q) => q,
        LagChoice::AutoSic => {
            if n_diff < max_lag + MIN_EFFECTIVE_OBS {
                return Err(too_short(max_lag));
            }
            let mut best = (f64::INFINITY, 0);
            for q in 0..=max_lag {
                let (target, x) = adf_design(y, q, max_lag, regression);
                // a candidate whose lags are collinear with the level cannot be chosen
                let fit = match ols(&target, &x) {
                    Ok(fit) => fit,
                    Err(Error::RankDeficient { .. }) if q > 0 => continue,
                    Err(e) => return Err(e),
                };
                let n = fit.n_obs as f64;
                let ssr = fit.resid.norm_squared();
                let sic = (ssr / n).ln() + fit.n_params as f64 * n.ln() / n;
                if sic < best.0 {
                    best = (sic, q);
                }
            }
            best.1
        }
    };
    if n_diff < used_lag + MIN_EFFECTIVE_OBS {
        return Err(too_short(used_lag));
    }
    let (target, x) = adf_design(y, used_lag, used_lag, regression);
    let fit = ols(&target, &x)?;
    // an exact fit has a zero standard error; the ratio is then infinite
    let statistic = if fit.std_err[0] > 0.0 {
        fit.t_stat[0]
    } else if fit.coef[0] != 0.0 {
        fit.coef[0].signum() * f64::INFINITY
    } else {
        0.0
    };
    let crit_values = mackinnon_critvals(regression, fit.n_obs);
    Ok(AdfResult {
        statistic,
        p_value: mackinnon_pvalue(statistic, regression),
        used_lag,
        max_lag: if matches!(lag_choice, LagChoice::AutoSic) { max_lag } else { used_lag },
        n_obs_effective: fit.n_obs,
        crit_values,
        regression,
        reject_at_5pct: statistic < crit_values.pct5,
    })
}
