//! Least squares through the explicit normal equations.

use crate::dd::{invert, matmul, to_dd, transpose, Dd, DdMat};

pub struct NormalEquationsFit {
    pub coef: Vec<f64>,
    pub std_err: Vec<f64>,
    pub resid: Vec<f64>,
    pub ssr: f64,
}

/// `beta = (X'X)^{-1} X'y` in double-double; `x` is given as rows.
pub fn normal_equations(y: &[f64], x: &[Vec<f64>]) -> NormalEquationsFit {
    let n = y.len();
    let m = x[0].len();
    let xd = to_dd(x);
    let xt = transpose(&xd);
    let xtx = matmul(&xt, &xd);
    let inv = invert(&xtx).expect("normal-equations oracle: singular X'X");
    let yd: DdMat = y.iter().map(|&v| vec![Dd::new(v)]).collect();
    let xty = matmul(&xt, &yd);
    let beta = matmul(&inv, &xty);
    let fitted = matmul(&xd, &beta);
    let resid: Vec<Dd> = (0..n).map(|i| yd[i][0] - fitted[i][0]).collect();
    let ssr = resid.iter().fold(Dd::ZERO, |acc, &e| acc + e * e);
    let sigma2 = if n > m { ssr / Dd::new((n - m) as f64) } else { Dd::ZERO };
    NormalEquationsFit {
        coef: beta.iter().map(|r| r[0].to_f64()).collect(),
        std_err: (0..m).map(|i| (sigma2 * inv[i][i]).sqrt().to_f64()).collect(),
        resid: resid.iter().map(|e| e.to_f64()).collect(),
        ssr: ssr.to_f64(),
    }
}

/// Residuals of every column of `y` (rows x cols) regressed on `z` (rows).
/// An empty `z` returns `y` unchanged.
pub fn residualize(y: &DdMat, z: &[Vec<f64>]) -> DdMat {
    if z.is_empty() || z[0].is_empty() {
        return y.clone();
    }
    let zd = to_dd(z);
    let zt = transpose(&zd);
    let inv = invert(&matmul(&zt, &zd)).expect("residualize: singular Z'Z");
    let coef = matmul(&inv, &matmul(&zt, y));
    let fitted = matmul(&zd, &coef);
    y.iter()
        .zip(fitted.iter())
        .map(|(a, b)| a.iter().zip(b.iter()).map(|(&u, &v)| u - v).collect())
        .collect()
}
