//! VAR lag-order selection on a common estimation sample.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::regress::{fit_var_on_sample, info_criteria};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Sic,
    Hqic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagRow {
    pub p: usize,
    pub aic: f64,
    pub sic: f64,
    pub hqic: f64,
}

impl LagRow {
    pub fn get(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Aic => self.aic,
            Criterion::Sic => self.sic,
            Criterion::Hqic => self.hqic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub p_max: usize,
    /// Observations in the shared estimation sample.
    pub n_obs: usize,
    pub rows: Vec<LagRow>,
    pub chosen: BTreeMap<Criterion, usize>,
}

pub const DEFAULT_P_MAX: usize = 12;

/// Fits VAR(1)..VAR(p_max) with intercept on rows `p_max+1..T` and picks
/// the minimizing order per criterion, preferring the smaller order on
/// ties.
pub fn select_lag(frame: &Frame, p_max: usize) -> Result<LagSelection> {
    if p_max == 0 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let k = frame.nvars();
    let t_len = frame.nobs();
    if t_len <= p_max || t_len - p_max <= k * p_max + 1 {
        return Err(Error::TooShort {
            needed: p_max + k * p_max + 1,
            available: t_len,
        });
    }
    let fits: Vec<Result<(LagRow, usize)>> = (1..=p_max)
        .into_par_iter()
        .map(|p| {
            let fit = fit_var_on_sample(frame, p, true, p_max)?;
            let ic = info_criteria(&fit)?;
            Ok((
                LagRow {
                    p,
                    aic: ic.aic,
                    sic: ic.sic,
                    hqic: ic.hqic,
                },
                fit.n_obs,
            ))
        })
        .collect();
    let mut rows = Vec::with_capacity(p_max);
    let mut n_obs = 0;
    for f in fits {
        let (row, n) = f?;
        rows.push(row);
        n_obs = n;
    }
    let mut chosen = BTreeMap::new();
    for c in [Criterion::Aic, Criterion::Sic, Criterion::Hqic] {
        chosen.insert(c, argmin(&rows, c));
    }
    Ok(LagSelection {
        p_max,
        n_obs,
        rows,
        chosen,
    })
}

fn argmin(rows: &[LagRow], c: Criterion) -> usize {
    let mut best = &rows[0];
    for row in &rows[1..] {
        if row.get(c) < best.get(c) {
            best = row;
        }
    }
    best.p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Period;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn var1_frame(t: usize, seed: u64) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = [[0.5, 0.1], [0.2, 0.3]];
        let mut data = DMatrix::zeros(t, 2);
        let mut prev = [0.0; 2];
        for i in 0..t {
            let e: [f64; 2] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            let cur = [
                a[0][0] * prev[0] + a[0][1] * prev[1] + e[0],
                a[1][0] * prev[0] + a[1][1] * prev[1] + e[1],
            ];
            data[(i, 0)] = cur[0];
            data[(i, 1)] = cur[1];
            prev = cur;
        }
        Frame::new(vec!["x".into(), "y".into()], Period::new(1990, 1).unwrap(), data).unwrap()
    }

    #[test]
    fn singleton_grid() {
        let s = select_lag(&var1_frame(100, 1), 1).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.chosen.values().all(|&p| p == 1));
    }

    #[test]
    fn common_sample_and_penalty_ordering() {
        let f = var1_frame(300, 4);
        let s = select_lag(&f, 6).unwrap();
        assert_eq!(s.n_obs, 300 - 6);
        assert!(s.chosen[&Criterion::Sic] <= s.chosen[&Criterion::Aic]);
        assert_eq!(s.chosen[&Criterion::Sic], 1);
    }

    #[test]
    fn ties_go_to_smaller_order() {
        let row = |p, v| LagRow {
            p,
            aic: v,
            sic: v,
            hqic: v,
        };
        let rows = [row(1, 2.0), row(2, 1.0), row(3, 1.0), row(4, 3.0)];
        assert_eq!(argmin(&rows, Criterion::Aic), 2);
    }

    #[test]
    fn too_short() {
        let f = var1_frame(10, 1);
        assert!(matches!(select_lag(&f, 4), Err(Error::TooShort { .. })));
    }
}
