mod common;

use cointegrate::data_io::{dgp_simulate, read_frame_csv, write_frame_csv, DgpSpec};
use cointegrate::frame::describe_values;
use cointegrate::irf::{irf_point, to_level_var};
use cointegrate::johansen::{johansen, DetSpec};
use cointegrate::regress::fit_var;
use cointegrate::unit_root::{adf_values, mackinnon_pvalue, LagChoice, Regression};
use cointegrate::var_select::{select_lag, Criterion};
use cointegrate::vecm::{fit_vecm, fit_vecm_with_beta, fitted_differences, vecm_residuals};
use cointegrate::{align, diff, lag_matrix, AlignPolicy, Frame};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_frame(t: usize, k: usize, seed: u64) -> Frame {
    let mut r = rng(seed);
    let data = DMatrix::from_fn(t, k, |_, _| normal(&mut r));
    let names = (0..k).map(|i| format!("v{i}")).collect();
    Frame::new(names, start(), data).unwrap()
}

fn ar1(t: usize, phi: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut y = Vec::with_capacity(t);
    let mut prev = 0.0;
    for _ in 0..t {
        prev = phi * prev + normal(&mut r);
        y.push(prev);
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adf_is_affine_invariant(seed in 0u64..10_000, a in -50.0f64..50.0, b in prop_oneof![-20.0f64..-0.1, 0.1f64..20.0]) {
        let y = ar1(200, 0.95, seed);
        let z: Vec<f64> = y.iter().map(|v| a + b * v).collect();
        for choice in [LagChoice::Fixed(2), LagChoice::AutoSic] {
            let r1 = adf_values(&y, Regression::Constant, None, choice).unwrap();
            let r2 = adf_values(&z, Regression::Constant, None, choice).unwrap();
            prop_assert_eq!(r1.used_lag, r2.used_lag);
            prop_assert!((r1.statistic - r2.statistic).abs() < 1e-9);
        }
    }

    #[test]
    fn adf_verdict_matches_critical_value(seed in 0u64..10_000, phi in 0.0f64..1.0) {
        let y = ar1(150, phi, seed);
        for reg in [Regression::None, Regression::Constant, Regression::ConstantTrend] {
            let r = adf_values(&y, reg, None, LagChoice::AutoSic).unwrap();
            prop_assert_eq!(r.reject_at_5pct, r.statistic < r.crit_values.pct5);
            prop_assert!(r.crit_values.pct1 < r.crit_values.pct5 && r.crit_values.pct5 < r.crit_values.pct10);
        }
    }

    #[test]
    fn trace_invariant_under_linear_maps(seed in 0u64..10_000, entries in prop::collection::vec(-3.0f64..3.0, 9)) {
        let m = DMatrix::from_row_slice(3, 3, &entries) + DMatrix::identity(3, 3) * 4.0;
        prop_assume!(m.clone().singular_values().min() > 0.1);
        let f = random_walks(200, 3, seed);
        let g = Frame::new(f.names().to_vec(), f.start(), f.data() * &m).unwrap();
        for det in [DetSpec::None, DetSpec::RestrictedConstant, DetSpec::UnrestrictedConstant] {
            let a = johansen(&f, 2, det).unwrap();
            let b = johansen(&g, 2, det).unwrap();
            for (x, y) in a.trace_stats.iter().zip(&b.trace_stats) {
                prop_assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn johansen_invariants(seed in 0u64..10_000, lag in 0usize..4) {
        let f = random_walks(150, 3, seed);
        for det in [DetSpec::None, DetSpec::RestrictedConstant, DetSpec::UnrestrictedConstant] {
            let j = johansen(&f, lag, det).unwrap();
            prop_assert!(j.eigenvalues.iter().all(|&l| (0.0..1.0).contains(&l)));
            prop_assert!(j.trace_stats.windows(2).all(|w| w[0] > w[1]));
            let g = j.eigenvectors.transpose() * &j.moments.s11 * &j.eigenvectors;
            prop_assert!((g - DMatrix::identity(3, 3)).amax() < 1e-8);
        }
    }

    #[test]
    fn full_rank_vecm_is_level_var(seed in 0u64..10_000, lag in 0usize..3) {
        let f = random_frame(200, 3, seed);
        let model = fit_vecm(&f, 3, lag, DetSpec::UnrestrictedConstant).unwrap();
        let var = fit_var(&f, lag + 1, true).unwrap();
        let vecm_fit = fitted_differences(&model, &f).unwrap();
        let t0 = lag + 1;
        for t in 0..vecm_fit.nrows() {
            for i in 0..3 {
                let from_var = var.fitted[(t, i)] - f.data()[(t0 + t - 1, i)];
                prop_assert!((vecm_fit[(t, i)] - from_var).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn vecm_inference_and_structure(seed in 0u64..10_000, rank in 1usize..3) {
        let f = random_walks(200, 3, seed);
        let model = fit_vecm(&f, rank, 2, DetSpec::RestrictedConstant).unwrap();
        // identity top block and rank of Π
        for i in 0..rank {
            for j in 0..rank {
                prop_assert_eq!(model.beta[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
        let sv = model.pi().singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        if rank < 3 {
            prop_assert!(sv[rank] < 1e-8 * sv[0]);
        }
        let rows = model
            .inference
            .equations
            .iter()
            .flat_map(|e| e.alpha.iter().chain(&e.gamma).chain(e.constant.iter()))
            .chain(model.inference.beta.iter().flat_map(|b| b.rows.iter()));
        for c in rows {
            prop_assert!(c.ci_low < c.estimate && c.estimate < c.ci_high);
            prop_assert!((c.z - c.estimate / c.std_err).abs() < 1e-9 * c.z.abs().max(1.0));
        }
        let again = fit_vecm_with_beta(&f, &model.beta, 2, DetSpec::RestrictedConstant).unwrap();
        prop_assert_eq!(&again.alpha, &model.alpha);
        prop_assert_eq!(&again.gamma, &model.gamma);
        // residuals orthogonal to the second-stage regressors
        let resid = vecm_residuals(&model, &f).unwrap();
        let ec = cointegrate::vecm::ec_terms(&model, &f).unwrap();
        let cross = ec.values.transpose() * &resid;
        let scale = ec.values.norm() * resid.norm();
        prop_assert!(cross.amax() < 1e-9 * scale);
    }

    #[test]
    fn level_var_sums_to_pi(seed in 0u64..10_000, lag in 0usize..4) {
        let f = random_walks(150, 3, seed);
        let model = fit_vecm(&f, 2, lag, DetSpec::RestrictedConstant).unwrap();
        let a = to_level_var(&model);
        prop_assert_eq!(a.len(), lag + 1);
        let mut sum = -DMatrix::<f64>::identity(3, 3);
        for m in &a {
            sum += m;
        }
        prop_assert!((sum - model.pi()).amax() < 1e-10);
    }

    #[test]
    fn impact_responses_are_lower_triangular(seed in 0u64..10_000) {
        let f = random_walks(150, 3, seed);
        let model = fit_vecm(&f, 1, 1, DetSpec::RestrictedConstant).unwrap();
        let p = irf_point(&model, 5).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                prop_assert_eq!(p[0][(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn lag_selection_properties(seed in 0u64..10_000) {
        let (f, _) = stable_var(200, 2, 1, seed);
        let s = select_lag(&f, 5).unwrap();
        prop_assert!(s.chosen[&Criterion::Sic] <= s.chosen[&Criterion::Aic]);
        // permuting variables leaves every criterion unchanged
        let names: Vec<String> = f.names().iter().rev().cloned().collect();
        let g = f.select(&names).unwrap();
        let t = select_lag(&g, 5).unwrap();
        for (a, b) in s.rows.iter().zip(&t.rows) {
            prop_assert!((a.aic - b.aic).abs() < 1e-10);
            prop_assert!((a.sic - b.sic).abs() < 1e-10);
            prop_assert!((a.hqic - b.hqic).abs() < 1e-10);
        }
    }

    #[test]
    fn frame_transforms(seed in 0u64..10_000, lags in 1usize..5) {
        let f = random_frame(40, 3, seed);
        let d2 = diff(&f, 2).unwrap();
        let dd = diff(&diff(&f, 1).unwrap(), 1).unwrap();
        prop_assert!((d2.data() - dd.data()).amax() < 1e-12);
        prop_assert_eq!(d2.start(), f.start().add_months(2));
        let (y, x) = lag_matrix(&f, lags).unwrap();
        for t in 0..y.nrows() {
            prop_assert_eq!(y.row(t), f.data().row(t + lags));
            for l in 1..=lags {
                for j in 0..3 {
                    prop_assert_eq!(x[(t, (l - 1) * 3 + j)], f.data()[(t + lags - l, j)]);
                }
            }
        }
        let series = f.to_series();
        let once = align(&series, AlignPolicy::Intersection).unwrap();
        let twice = align(&once.to_series(), AlignPolicy::Intersection).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn describe_bounds(values in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let d = describe_values("x", &values);
        prop_assert!(d.min <= d.mean + 1e-9 * d.mean.abs().max(1.0));
        prop_assert!(d.mean <= d.max + 1e-9 * d.mean.abs().max(1.0));
        prop_assert!(d.std_dev >= 0.0);
        let c = describe_values("c", &vec![values[0]; values.len()]);
        prop_assert_eq!(c.std_dev, 0.0);
    }

    #[test]
    fn frame_csv_round_trip(seed in 0u64..10_000) {
        let f = random_frame(30, 2, seed);
        let mut buf = Vec::new();
        write_frame_csv(&mut buf, &f).unwrap();
        let back = read_frame_csv(buf.as_slice(), "mem").unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn pvalue_strictly_decreasing() {
    for reg in [Regression::None, Regression::Constant, Regression::ConstantTrend] {
        let ps: Vec<f64> = (0..100)
            .map(|i| mackinnon_pvalue(-6.0 + 0.064 * i as f64, reg))
            .collect();
        assert!(ps.windows(2).all(|w| w[0] < w[1]), "{reg:?}");
    }
}

#[test]
fn first_ordered_variable_ignores_later_shocks_on_impact() {
    let f = bivariate_coint(300, 9);
    let m = fit_vecm(&f, 1, 1, DetSpec::RestrictedConstant).unwrap();
    let p = irf_point(&m, 3).unwrap();
    assert_eq!(p[0][(0, 1)], 0.0);
    let g = f.select(&["y2".to_string(), "y1".to_string()]).unwrap();
    let m2 = fit_vecm(&g, 1, 1, DetSpec::RestrictedConstant).unwrap();
    let q = irf_point(&m2, 3).unwrap();
    assert_eq!(q[0][(0, 1)], 0.0);
    // ordering matters for the orthogonalized responses
    assert!((p[0][(1, 0)] - q[0][(0, 1)]).abs() > 1e-6);
}

#[test]
fn stationary_responses_die_out_and_cointegrated_ones_persist() {
    let (f, _) = stable_var(400, 2, 2, 21);
    let stable = fit_vecm(&f, 2, 1, DetSpec::UnrestrictedConstant).unwrap();
    let p = irf_point(&stable, 48).unwrap();
    assert!(p[48].amax() < p[0].amax());
    assert!(p[48].amax() < 1e-2 * p[0].amax());

    let spec = DgpSpec::bivariate_example(2000, 3);
    let g = dgp_simulate(&spec).unwrap();
    let coint = fit_vecm(&g, 1, 1, DetSpec::RestrictedConstant).unwrap();
    let q = irf_point(&coint, 200).unwrap();
    // permanent effect of the first shock on both variables
    assert!(q[200][(0, 0)].abs() > 0.1 * q[0][(0, 0)].abs());
    assert!((&q[200] - &q[199]).amax() < 1e-6);
}
