#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use cointegrate::data_io::{dgp_simulate, DgpSpec, RawSeries, Snapshot};
use cointegrate::Period;

pub const BIN: &str = env!("CARGO_BIN_EXE_cointegrate");

/// Six monthly series under the dataset's FRED ids, 1959-01..2024-08.
/// Two cointegrating relations tie the first four; the last two are
/// independent random walks. Sentiment is quarterly before 1978.
pub fn synthetic_snapshot(dir: &Path) {
    let t = 788;
    let z = |k: usize| vec![0.0; k];
    let mut alpha = vec![z(2); 6];
    alpha[0] = vec![-0.2, 0.0];
    alpha[1] = vec![0.0, -0.2];
    alpha[2] = vec![0.2, 0.0];
    alpha[3] = vec![0.0, 0.2];
    let mut beta = vec![z(2); 6];
    beta[0] = vec![1.0, 0.0];
    beta[1] = vec![0.0, 1.0];
    beta[2] = vec![-1.0, 0.0];
    beta[3] = vec![0.0, -1.0];
    let noise_cov = (0..6).map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let spec = DgpSpec {
        k: 6,
        rank: 2,
        alpha,
        beta,
        gamma: vec![],
        noise_cov,
        t,
        burn_in: 50,
        seed: 2024,
        names: None,
        start: Some(Period::new(1959, 1).unwrap()),
    };
    let frame = dgp_simulate(&spec).unwrap();
    // column order: credit, sentiment, rate, prices, money, unemployment
    let ids = ["TOTALNS", "UMCSENT", "M2SL", "CPIAUCSL", "FEDFUNDS", "UNRATE"];
    let offsets = [1500.0, 85.0, 5000.0, 140.0, 5.0, 6.0];
    let quarterly_until = Period::new(1978, 1).unwrap();
    let series: Vec<RawSeries> = ids
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let obs = (0..t)
                .map(|i| (frame.start().add_months(i as i64), frame.data()[(i, j)] + offsets[j]))
                .filter(|(p, _)| *id != "UMCSENT" || *p >= quarterly_until || p.month() % 3 == 2)
                .collect();
            RawSeries::new(*id, obs)
        })
        .collect();
    Snapshot::write(dir, "2024-09-01", "2024-09-01T00:00:00Z", &series).unwrap();
}

pub fn run(args: &[&str], cwd: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(cwd).env_remove("COINTEGRATE_SNAPSHOT_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}
