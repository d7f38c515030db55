//! Squared canonical correlations of a bivariate system from explicit
//! moment-matrix algebra.

use crate::dd::{invert, matmul, transpose, Dd, DdMat};
use crate::ols::residualize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    None,
    /// Constant included in both auxiliary regressions.
    Constant,
}

/// Eigenvalues (descending) of `S11^{-1} S10 S00^{-1} S01` for two series
/// given as `levels[t] = [y1_t, y2_t]`.
pub fn bivariate_eigenvalues(levels: &[[f64; 2]], lag_diff: usize, det: Deterministic) -> [f64; 2] {
    let t_len = levels.len();
    let dy: Vec<[f64; 2]> = (1..t_len)
        .map(|t| [levels[t][0] - levels[t - 1][0], levels[t][1] - levels[t - 1][1]])
        .collect();
    // dy[s] is the difference ending at levels[s + 1]
    let mut r0: DdMat = Vec::new();
    let mut r1: DdMat = Vec::new();
    let mut z: Vec<Vec<f64>> = Vec::new();
    for s in lag_diff..dy.len() {
        r0.push(vec![Dd::new(dy[s][0]), Dd::new(dy[s][1])]);
        r1.push(vec![Dd::new(levels[s][0]), Dd::new(levels[s][1])]);
        let mut row = Vec::new();
        for l in 1..=lag_diff {
            row.extend_from_slice(&dy[s - l]);
        }
        if det == Deterministic::Constant {
            row.push(1.0);
        }
        z.push(row);
    }
    let n = Dd::new(r0.len() as f64);
    let r0 = residualize(&r0, &z);
    let r1 = residualize(&r1, &z);
    let scale = |m: DdMat| -> DdMat {
        m.into_iter()
            .map(|row| row.into_iter().map(|v| v / n).collect())
            .collect()
    };
    let s00 = scale(matmul(&transpose(&r0), &r0));
    let s01 = scale(matmul(&transpose(&r0), &r1));
    let s11 = scale(matmul(&transpose(&r1), &r1));
    let s10 = transpose(&s01);
    let m = matmul(
        &invert(&s11).expect("singular S11"),
        &matmul(&s10, &matmul(&invert(&s00).expect("singular S00"), &s01)),
    );
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = tr / Dd::new(2.0);
    let disc = (half * half - det).sqrt();
    [(half + disc).to_f64(), (half - disc).to_f64()]
}
