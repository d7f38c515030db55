//! Dickey-Fuller regression built directly from the series.

use crate::ols::normal_equations;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

pub struct AdfReference {
    pub statistic: f64,
    pub lag: usize,
    pub n_obs: usize,
}

fn design(y: &[f64], lag: usize, start: usize, det: Deterministic) -> (Vec<f64>, Vec<Vec<f64>>) {
    // difference index s: dy[s] = y[s + 1] - y[s]
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut target = Vec::new();
    let mut rows = Vec::new();
    for s in start..dy.len() {
        target.push(dy[s]);
        let mut row = vec![y[s]];
        for l in 1..=lag {
            row.push(dy[s - l]);
        }
        match det {
            Deterministic::None => {}
            Deterministic::Constant => row.push(1.0),
            Deterministic::ConstantTrend => {
                row.push(1.0);
                row.push((s + 1) as f64);
            }
        }
        rows.push(row);
    }
    (target, rows)
}

/// ADF t-ratio with a fixed number of lagged differences.
pub fn adf_fixed(y: &[f64], lag: usize, det: Deterministic) -> AdfReference {
    let (target, rows) = design(y, lag, lag, det);
    let fit = normal_equations(&target, &rows);
    AdfReference {
        statistic: fit.coef[0] / fit.std_err[0],
        lag,
        n_obs: target.len(),
    }
}

/// Lag chosen by `ln(SSR/n) + m ln(n)/n` over `0..=max_lag` on the sample
/// that is common to all candidates, then the chosen lag refitted on its
/// own full sample.
pub fn adf_auto_sic(y: &[f64], max_lag: usize, det: Deterministic) -> AdfReference {
    let mut best = (f64::INFINITY, 0usize);
    for lag in 0..=max_lag {
        let (target, rows) = design(y, lag, max_lag, det);
        let n = target.len() as f64;
        let m = rows[0].len() as f64;
        let fit = normal_equations(&target, &rows);
        let sic = (fit.ssr / n).ln() + m * n.ln() / n;
        if sic < best.0 {
            best = (sic, lag);
        }
    }
    adf_fixed(y, best.1, det)
}
