//! End-to-end runs of the binary: exit codes, output shapes, determinism.

mod common;

use common::*;
use serde_json::Value;

fn with_snapshot() -> (tempfile::TempDir, Vec<(&'static str, String)>) {
    let tmp = tempfile::tempdir().unwrap();
    let snap = tmp.path().join("snap");
    synthetic_snapshot(&snap);
    let env = vec![("COINTEGRATE_SNAPSHOT_DIR", snap.display().to_string())];
    (tmp, env)
}

fn env_ref<'a>(env: &'a [(&'static str, String)]) -> Vec<(&'static str, &'a str)> {
    env.iter().map(|(k, v)| (*k, v.as_str())).collect()
}

#[test]
fn simulate_is_deterministic_and_shaped() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run(&["simulate"], tmp.path(), &[]);
    let b = run(&["simulate"], tmp.path(), &[]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "DATE,y1,y2");
    assert_eq!(lines.len(), 1001);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));
}

#[test]
fn simulated_data_piped_into_johansen_selects_rank_one() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = run(&["simulate", "--out", "sim.csv"], tmp.path(), &[]);
    assert!(sim.status.success());
    let j = stdout_json(&run(
        &["johansen", "--input", "sim.csv", "--lag-diff", "1", "--det", "restricted_constant"],
        tmp.path(),
        &[],
    ));
    assert_eq!(j["selected_rank"], 1);
    assert_eq!(j["rows"].as_array().unwrap().len(), 2);
    assert!(tmp.path().join("output/johansen.json").exists());
}

#[test]
fn config_errors_exit_two_with_field_path() {
    let tmp = tempfile::tempdir().unwrap();
    for (args, path) in [
        (vec!["report", "--rank", "7"], "johansen.rank"),
        (vec!["irf", "--n-boot", "10"], "irf.n_boot"),
        (vec!["adf", "--adf.regresion", "constant"], "adf.regresion"),
        (vec!["lagselect", "--p-max", "twelve"], "lagselect.p_max"),
        (vec!["johansen", "--bogus", "1"], "bogus"),
    ] {
        let o = run(&args, tmp.path(), &[]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(diag["kind"], "config");
        assert_eq!(diag["path"], path, "{args:?}");
    }
    std::fs::write(tmp.path().join("bad.json"), r#"{"johansen": {"rank": 7}}"#).unwrap();
    let o = run(&["vecm", "--config", "bad.json"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("johansen.rank"));
}

#[test]
fn computation_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere");
    let o = run(&["describe", "--snapshot", missing.to_str().unwrap()], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["status"], "error");

    // a sample too short for the requested lags
    std::fs::write(tmp.path().join("short.csv"), "DATE,a,b\n2000-01,1,2\n2000-02,2,1\n2000-03,3,5\n").unwrap();
    let o = run(&["johansen", "--input", "short.csv"], tmp.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fetch_without_key_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["fetch", "--out", "snap"], tmp.path(), &[("FRED_API_KEY", "")]);
    assert_eq!(o.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["kind"], "fetch");
    assert!(!tmp.path().join("snap").exists());
}

#[test]
fn adf_series_output_matches_result_fields() {
    let (tmp, env) = with_snapshot();
    let j = stdout_json(&run(&["adf", "--series", "FEDFUNDS"], tmp.path(), &env_ref(&env)));
    assert_eq!(j["schema_version"], 1);
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r["series"], "FEDFUNDS");
    for f in ["statistic", "p_value", "used_lag", "max_lag", "n_obs_effective", "regression", "reject_at_5pct"] {
        assert!(!r[f].is_null(), "missing {f}");
    }
    for c in ["1%", "5%", "10%"] {
        assert!(r["crit_values"][c].is_f64());
    }
    // by series id as well as column name
    let j = stdout_json(&run(&["adf", "--series", "TOTALNS"], tmp.path(), &env_ref(&env)));
    assert_eq!(j["rows"][0]["series"], "CREDIT");
}

#[test]
fn describe_counts_observed_months() {
    let (tmp, env) = with_snapshot();
    let j = stdout_json(&run(&["describe"], tmp.path(), &env_ref(&env)));
    let rows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let n = |name: &str| rows.iter().find(|r| r["name"] == name).unwrap()["n_obs"].as_u64().unwrap();
    assert_eq!(n("CREDIT"), 788);
    assert_eq!(n("UMCSENT"), 560 + 19 * 4);
}

#[test]
fn vecm_then_irf_from_model() {
    let (tmp, env) = with_snapshot();
    let env = env_ref(&env);
    let v = stdout_json(&run(&["vecm", "--rank", "2"], tmp.path(), &env));
    let model = &v["model"];
    assert_eq!(model["rank"], 2);
    assert_eq!(model["k"], 5);
    assert_eq!(model["beta"]["rows"], 6);
    assert_eq!(model["inference"]["equations"].as_array().unwrap().len(), 5);
    let i = stdout_json(&run(
        &["irf", "--from-model", "output/model.json", "--n-boot", "99", "--horizon", "12"],
        tmp.path(),
        &env,
    ));
    assert_eq!(i["rows"].as_array().unwrap().len(), 13 * 5 * 5);
    assert_eq!(i["model"]["source"], "file");
    let csv = std::fs::read_to_string(tmp.path().join("output/irf.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 13 * 5 * 5);

    // a saved model pins the ordering
    let o = run(
        &[
            "irf",
            "--from-model",
            "output/model.json",
            "--ordering",
            "UMCSENT,CREDIT,FEDFUNDS,CPIAUCSL,M2SL",
        ],
        tmp.path(),
        &env,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ordering_flag_reorders_the_system() {
    let (tmp, env) = with_snapshot();
    let i = stdout_json(&run(
        &["irf", "--ordering", "M2SL,CPIAUCSL,FEDFUNDS,UMCSENT,CREDIT", "--n-boot", "99", "--horizon", "2"],
        tmp.path(),
        &env_ref(&env),
    ));
    assert_eq!(i["ordering"][0], "M2SL");
    // the first variable does not respond on impact to later shocks
    let rows = i["rows"].as_array().unwrap();
    let impact = rows
        .iter()
        .find(|r| r["horizon"] == 0 && r["response"] == "M2SL" && r["impulse"] == "CREDIT")
        .unwrap();
    assert_eq!(impact["point"], 0.0);
}

fn markdown_numbers(md: &str) -> Vec<String> {
    md.lines()
        .filter(|l| l.starts_with('|') && !l.contains("---"))
        .flat_map(|l| l.split('|').map(|c| c.trim().to_string()).collect::<Vec<_>>())
        .filter(|c| c.parse::<f64>().is_ok())
        .collect()
}

#[test]
fn markdown_numbers_come_from_json() {
    let (tmp, env) = with_snapshot();
    let o = run(&["johansen", "--format", "markdown"], tmp.path(), &env_ref(&env));
    let j = stdout_json(&o);
    let md = std::fs::read_to_string(tmp.path().join("output/johansen.md")).unwrap();
    let shown = markdown_numbers(&md);
    for r in j["rows"].as_array().unwrap() {
        let trace = format!("{:.3}", r["trace"].as_f64().unwrap());
        let cv = format!("{:.3}", r["cv95"].as_f64().unwrap());
        let eig = format!("{:.4}", r["eigenvalue"].as_f64().unwrap());
        for s in [trace, cv, eig] {
            assert!(shown.contains(&s), "{s} not in markdown");
        }
    }
    let saved: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("output/johansen.json")).unwrap()).unwrap();
    assert_eq!(saved, j);
}

#[test]
fn csv_format_writes_tables() {
    let (tmp, env) = with_snapshot();
    let o = run(&["vecm", "--format", "csv"], tmp.path(), &env_ref(&env));
    assert!(o.status.success());
    let out = tmp.path().join("output");
    for f in ["vecm_eq_CREDIT.csv", "vecm_alpha.csv", "vecm_beta.csv", "vecm_beta_inference.csv", "vecm.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let eq = std::fs::read_to_string(out.join("vecm_eq_CREDIT.csv")).unwrap();
    assert!(eq.starts_with(",Coef.,Std. Err.,z,P>|z|,95% CI Lower,95% CI Upper"));
}

#[test]
fn report_is_complete_and_byte_identical() {
    let (tmp, env) = with_snapshot();
    let mut env1 = env_ref(&env);
    env1.push(("RAYON_NUM_THREADS", "1"));
    let mut env4 = env_ref(&env);
    env4.push(("RAYON_NUM_THREADS", "4"));
    let args = |out: &'static str| ["report", "--seed", "1", "--n-boot", "199", "--out", out];
    for (out, e) in [("a", &env1), ("b", &env4), ("c", &env4)] {
        let o = run(&args(out), tmp.path(), e);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &str, f: &str| std::fs::read(tmp.path().join(d).join(f)).unwrap();
    for f in ["bundle.json", "report.md", "irf.csv", "model.json"] {
        assert_eq!(read("a", f), read("b", f), "{f} differs across thread counts");
        assert_eq!(read("b", f), read("c", f), "{f} differs across runs");
    }
    let md = String::from_utf8(read("a", "report.md")).unwrap();
    for section in [
        "Descriptive statistics",
        "Augmented Dickey-Fuller tests",
        "VAR lag order selection",
        "Johansen trace test",
        "Equation D_CREDIT",
        "Equation D_M2SL",
        "Loading coefficients",
        "Cointegrating equations",
        "Normalized cointegrating vectors",
        "Orthogonalized impulse responses",
    ] {
        assert!(md.contains(section), "missing {section}");
    }
    let bundle: Value = serde_json::from_slice(&read("a", "bundle.json")).unwrap();
    assert_eq!(bundle["schema_version"], 1);
    assert!(bundle["data"]["manifest_sha256"].is_string());
    assert!(bundle["software"]["version"].is_string());
    assert_eq!(bundle["config"]["irf"]["seed"], 1);
    assert!(!tmp.path().read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().contains("partial")));

    let o = run(&["report", "--seed", "2", "--n-boot", "199", "--out", "d"], tmp.path(), &env_ref(&env));
    assert!(o.status.success());
    assert_ne!(read("a", "bundle.json"), read("d", "bundle.json"));
}

#[test]
fn failed_report_leaves_no_partial_output() {
    let (tmp, env) = with_snapshot();
    // lag order too large for the sample: fails in the lag-selection stage
    let o = run(&["report", "--p-max", "200", "--out", "r"], tmp.path(), &env_ref(&env));
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("r").exists());
    assert!(tmp.path().read_dir().unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().starts_with('r')));
}

#[test]
fn help_lists_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["--help"], tmp.path(), &[]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for c in ["describe", "adf", "lagselect", "johansen", "vecm", "irf", "report", "simulate", "fetch"] {
        assert!(text.contains(c), "{c}");
    }
    let o = run(&["johansen", "--help"], tmp.path(), &[]);
    assert!(o.status.success());
}
