//! Impulse responses by direct forward simulation of a level VAR.

/// Simulate `y_t = sum_i A_i y_{t-i} + e_t` from zero history twice, once
/// with `e_0 = impact` and once with `e_0 = 0`, all later shocks zero, and
/// return the difference path for `t = 0..=horizon`.
///
/// `coefs[i]` is `A_{i+1}` as rows.
pub fn shock_response(coefs: &[Vec<Vec<f64>>], impact: &[f64], horizon: usize) -> Vec<Vec<f64>> {
    let shocked = simulate(coefs, impact, horizon);
    let baseline = simulate(coefs, &vec![0.0; impact.len()], horizon);
    shocked
        .iter()
        .zip(baseline.iter())
        .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x - y).collect())
        .collect()
}

fn simulate(coefs: &[Vec<Vec<f64>>], first_shock: &[f64], horizon: usize) -> Vec<Vec<f64>> {
    let k = first_shock.len();
    let p = coefs.len();
    // p rows of zero history followed by the simulated path
    let mut path: Vec<Vec<f64>> = vec![vec![0.0; k]; p];
    for t in 0..=horizon {
        let mut y = if t == 0 { first_shock.to_vec() } else { vec![0.0; k] };
        for (lag, a) in coefs.iter().enumerate() {
            let prev = &path[path.len() - 1 - lag];
            for i in 0..k {
                for j in 0..k {
                    y[i] += a[i][j] * prev[j];
                }
            }
        }
        path.push(y);
    }
    path.split_off(p)
}
