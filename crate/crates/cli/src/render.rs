//! Tables derived from the canonical JSON documents, printed as markdown
//! or CSV. Nothing here computes statistics.

use serde_json::Value;

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// Printed with 4 decimals.
    Coef(f64),
    /// Printed with 3 decimals.
    Stat(f64),
    Empty,
}

pub struct Table {
    pub title: String,
    pub stem: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub note: Option<String>,
}

fn fixed(v: f64, digits: usize) -> String {
    // small magnitudes would round to zero; show them in scientific form
    if v != 0.0 && v.abs() < 0.5 * 10f64.powi(-(digits as i32)) {
        format!("{v:.3e}")
    } else {
        format!("{v:.digits$}")
    }
}

impl Cell {
    fn markdown(&self) -> String {
        match self {
            Cell::Text(s) => s.replace('|', "\\|"),
            Cell::Int(i) => i.to_string(),
            Cell::Coef(v) => fixed(*v, 4),
            Cell::Stat(v) => fixed(*v, 3),
            Cell::Empty => String::new(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Coef(v) | Cell::Stat(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn coef(v: &Value) -> Cell {
    v.as_f64().map(Cell::Coef).unwrap_or(Cell::Empty)
}

fn stat(v: &Value) -> Cell {
    v.as_f64().map(Cell::Stat).unwrap_or(Cell::Empty)
}

fn int(v: &Value) -> Cell {
    v.as_i64().map(Cell::Int).unwrap_or(Cell::Empty)
}

fn text(v: &Value) -> Cell {
    match v {
        Value::String(s) => Cell::Text(s.clone()),
        Value::Null => Cell::Empty,
        other => Cell::Text(other.to_string()),
    }
}

fn arr(v: &Value) -> &[Value] {
    v.as_array().map(Vec::as_slice).unwrap_or(&[])
}

fn period_range(doc: &Value) -> String {
    match (doc["start"].as_str(), doc["end"].as_str()) {
        (Some(a), Some(b)) => format!("{a} to {b}"),
        _ => String::new(),
    }
}

const COEF_HEADER: [&str; 7] = ["", "Coef.", "Std. Err.", "z", "P>|z|", "95% CI Lower", "95% CI Upper"];

fn coef_row(label: String, r: &Value) -> Vec<Cell> {
    vec![
        Cell::Text(label),
        coef(&r["estimate"]),
        coef(&r["std_err"]),
        stat(&r["z"]),
        stat(&r["p_value"]),
        coef(&r["ci_low"]),
        coef(&r["ci_high"]),
    ]
}

fn describe_tables(doc: &Value) -> Vec<Table> {
    let rows = arr(&doc["rows"])
        .iter()
        .map(|r| {
            vec![
                text(&r["name"]),
                int(&r["n_obs"]),
                coef(&r["mean"]),
                coef(&r["std_dev"]),
                coef(&r["min"]),
                coef(&r["max"]),
            ]
        })
        .collect();
    let note = doc["window"]["from"]
        .as_str()
        .map(|a| format!("Observations from {a} to {}.", doc["window"]["to"].as_str().unwrap_or("")));
    vec![Table {
        title: "Descriptive statistics".into(),
        stem: "describe".into(),
        header: header(&["Variable", "Obs", "Mean", "Std. Dev.", "Min", "Max"]),
        rows,
        note,
    }]
}

fn adf_tables(doc: &Value) -> Vec<Table> {
    let rows = arr(&doc["rows"])
        .iter()
        .map(|r| {
            vec![
                text(&r["series"]),
                stat(&r["statistic"]),
                stat(&r["p_value"]),
                stat(&r["crit_values"]["1%"]),
                stat(&r["crit_values"]["5%"]),
                stat(&r["crit_values"]["10%"]),
                int(&r["used_lag"]),
                int(&r["n_obs_effective"]),
                Cell::Text(if r["reject_at_5pct"].as_bool() == Some(true) { "stationary" } else { "unit root" }.into()),
            ]
        })
        .collect();
    vec![Table {
        title: "Augmented Dickey-Fuller tests".into(),
        stem: "adf".into(),
        header: header(&["Variable", "ADF statistic", "p-value", "1% CV", "5% CV", "10% CV", "Lags", "Obs", "Verdict (5%)"]),
        rows,
        note: Some(format!(
            "Deterministic terms: {}.",
            doc["regression"].as_str().unwrap_or("")
        )),
    }]
}

fn lagselect_tables(doc: &Value) -> Vec<Table> {
    let chosen = &doc["chosen"];
    let mark = |c: &str, p: i64| if chosen[c].as_i64() == Some(p) { "*" } else { "" };
    let rows = arr(&doc["rows"])
        .iter()
        .map(|r| {
            let p = r["p"].as_i64().unwrap_or(-1);
            let by: Vec<&str> = ["aic", "sic", "hqic"].into_iter().filter(|c| !mark(c, p).is_empty()).collect();
            vec![
                int(&r["p"]),
                stat(&r["aic"]),
                stat(&r["sic"]),
                stat(&r["hqic"]),
                Cell::Text(by.join(", ").to_uppercase()),
            ]
        })
        .collect();
    vec![Table {
        title: "VAR lag order selection".into(),
        stem: "lagselect".into(),
        header: header(&["Lag", "AIC", "SIC", "HQIC", "Selected by"]),
        rows,
        note: Some(format!(
            "{} observations ({}), variables {}.",
            doc["n_obs"],
            period_range(doc),
            arr(&doc["variables"]).iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", ")
        )),
    }]
}

fn johansen_tables(doc: &Value) -> Vec<Table> {
    let rows = arr(&doc["rows"])
        .iter()
        .map(|r| {
            vec![
                text(&r["null"]),
                coef(&r["eigenvalue"]),
                stat(&r["trace"]),
                stat(&r["cv95"]),
                Cell::Text(if r["reject_5pct"].as_bool() == Some(true) { "reject" } else { "do not reject" }.into()),
            ]
        })
        .collect();
    let mut note = format!(
        "{} effective observations, {} lagged differences, deterministic case {}. Rank selected by the trace test: {}.",
        doc["n_obs_effective"],
        doc["lag_diff"],
        doc["det_spec"].as_str().unwrap_or(""),
        doc["selected_rank"]
    );
    if let Some(r) = doc["imposed_rank"].as_i64() {
        note.push_str(&format!(" Rank used for estimation: {r}."));
    }
    vec![Table {
        title: "Johansen trace test".into(),
        stem: "johansen".into(),
        header: header(&["Null hypothesis", "Eigenvalue", "Trace statistic", "5% critical value", "Decision"]),
        rows,
        note: Some(note),
    }]
}

fn vecm_tables(doc: &Value) -> Vec<Table> {
    let m = &doc["model"];
    let names: Vec<&str> = arr(&m["names"]).iter().filter_map(Value::as_str).collect();
    let mut out = Vec::new();
    for eq in arr(&m["inference"]["equations"]) {
        let e = eq["equation"].as_str().unwrap_or("");
        let mut rows: Vec<Vec<Cell>> = arr(&eq["alpha"])
            .iter()
            .chain(arr(&eq["gamma"]))
            .map(|r| coef_row(r["name"].as_str().unwrap_or("").to_string(), r))
            .collect();
        if !eq["constant"].is_null() {
            rows.push(coef_row("const".into(), &eq["constant"]));
        }
        out.push(Table {
            title: format!("Equation D_{e}"),
            stem: format!("vecm_eq_{e}"),
            header: header(&COEF_HEADER),
            rows,
            note: None,
        });
    }
    let mut head = header(&COEF_HEADER);
    head[0] = "Equation / vector".into();
    let rows = arr(&m["inference"]["equations"])
        .iter()
        .flat_map(|eq| {
            let e = eq["equation"].as_str().unwrap_or("").to_string();
            arr(&eq["alpha"])
                .iter()
                .map(move |r| coef_row(format!("{e} / {}", r["name"].as_str().unwrap_or("")), r))
                .collect::<Vec<_>>()
        })
        .collect();
    out.push(Table {
        title: "Loading coefficients".into(),
        stem: "vecm_alpha".into(),
        header: head,
        rows,
        note: None,
    });

    // β with the normalization rows shown as fixed values
    let row_names: Vec<&str> = arr(&doc["beta_rows"]).iter().filter_map(Value::as_str).collect();
    let beta = &m["beta"];
    let cols = beta["cols"].as_u64().unwrap_or(0) as usize;
    let at = |i: usize, j: usize| num(&arr(&beta["data"]).get(i * cols + j).cloned().unwrap_or(Value::Null));
    let mut rows = Vec::new();
    for (j, bi) in arr(&m["inference"]["beta"]).iter().enumerate() {
        let v = bi["vector"].as_str().unwrap_or("");
        for (i, rn) in row_names.iter().enumerate() {
            let free = arr(&bi["rows"]).iter().find(|r| r["name"].as_str() == Some(rn));
            rows.push(match free {
                Some(r) => coef_row(format!("{v} / {rn}"), r),
                None => {
                    let mut c = vec![Cell::Text(format!("{v} / {rn}")), Cell::Coef(at(i, j))];
                    c.extend((0..5).map(|_| Cell::Empty));
                    c
                }
            });
        }
    }
    let mut head = header(&COEF_HEADER);
    head[0] = "Vector / variable".into();
    out.push(Table {
        title: "Cointegrating equations".into(),
        stem: "vecm_beta_inference".into(),
        header: head,
        rows,
        note: Some("Normalized entries are fixed and carry no standard error. Standard errors of the free entries are asymptotic approximations.".into()),
    });

    let rows = row_names
        .iter()
        .enumerate()
        .map(|(i, rn)| {
            let mut r = vec![Cell::Text(rn.to_string())];
            r.extend((0..cols).map(|j| Cell::Coef(at(i, j))));
            r
        })
        .collect();
    let mut head = vec!["Variable".to_string()];
    head.extend((1..=cols).map(|j| format!("beta{j}")));
    out.push(Table {
        title: "Normalized cointegrating vectors".into(),
        stem: "vecm_beta".into(),
        header: head,
        rows,
        note: Some(format!("Variables: {}.", names.join(", "))),
    });

    let rows = arr(&doc["ec_adf"])
        .iter()
        .map(|r| {
            vec![
                text(&r["series"]),
                stat(&r["statistic"]),
                stat(&r["p_value"]),
                stat(&r["crit_values"]["5%"]),
                int(&r["used_lag"]),
                Cell::Text(if r["reject_at_5pct"].as_bool() == Some(true) { "stationary" } else { "unit root" }.into()),
            ]
        })
        .collect();
    out.push(Table {
        title: "Unit-root tests on the error-correction terms".into(),
        stem: "vecm_ec_adf".into(),
        header: header(&["Term", "ADF statistic", "p-value", "5% CV", "Lags", "Verdict (5%)"]),
        rows,
        note: Some(format!(
            "Sample {} to {}, {} effective observations.",
            m["sample"]["start"].as_str().unwrap_or(""),
            m["sample"]["end"].as_str().unwrap_or(""),
            m["sample"]["n_obs_effective"]
        )),
    });
    out
}

fn irf_tables(doc: &Value) -> Vec<Table> {
    let rows = arr(&doc["rows"])
        .iter()
        .map(|r| {
            vec![
                int(&r["horizon"]),
                text(&r["impulse"]),
                text(&r["response"]),
                coef(&r["point"]),
                coef(&r["low"]),
                coef(&r["high"]),
            ]
        })
        .collect();
    vec![Table {
        title: "Orthogonalized impulse responses".into(),
        stem: "irf".into(),
        header: header(&["Horizon", "Impulse", "Response", "Response value", "Band lower", "Band upper"]),
        rows,
        note: Some(format!(
            "Cholesky order {}; {} bands at level {} from {} replications (seed {}, {} failed).",
            arr(&doc["ordering"]).iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", "),
            doc["method"].as_str().unwrap_or(""),
            doc["level"],
            doc["n_boot"],
            doc["seed"],
            doc["failed_replications"]
        )),
    }]
}

pub fn tables(doc: &Value) -> Vec<Table> {
    match doc["kind"].as_str() {
        Some("describe") => describe_tables(doc),
        Some("adf") => adf_tables(doc),
        Some("lagselect") => lagselect_tables(doc),
        Some("johansen") => johansen_tables(doc),
        Some("vecm") => vecm_tables(doc),
        Some("irf") => irf_tables(doc),
        _ => vec![],
    }
}

pub fn table_markdown(t: &Table) -> String {
    let mut s = format!("### {}\n\n", t.title);
    let line = |cells: Vec<String>| format!("| {} |\n", cells.join(" | "));
    s += &line(t.header.iter().map(|h| h.replace('|', "\\|")).collect());
    s += &line(t.header.iter().map(|_| "---".to_string()).collect());
    for r in &t.rows {
        s += &line(r.iter().map(Cell::markdown).collect());
    }
    if let Some(n) = &t.note {
        s += &format!("\n{n}\n");
    }
    s
}

pub fn markdown(doc: &Value) -> String {
    tables(doc).iter().map(table_markdown).collect::<Vec<_>>().join("\n")
}

pub fn table_csv(t: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r.iter().map(Cell::csv)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_rules() {
        assert_eq!(Cell::Coef(0.12714).markdown(), "0.1271");
        assert_eq!(Cell::Stat(143.4619).markdown(), "143.462");
        assert_eq!(Cell::Coef(-3.302e-7).markdown(), "-3.302e-7");
        assert_eq!(Cell::Text("P>|z|".into()).markdown(), "P>\\|z\\|");
    }

    #[test]
    fn johansen_table_from_json() {
        let doc = serde_json::json!({
            "kind": "johansen", "n_obs_effective": 557, "lag_diff": 2, "det_spec": "unrestricted_constant",
            "selected_rank": 3, "imposed_rank": 2,
            "rows": [{"null": "r <= 0", "eigenvalue": 0.1, "trace": 143.4621, "cv95": 69.819, "reject_5pct": true}]
        });
        let md = markdown(&doc);
        assert!(md.contains("| r <= 0 | 0.1000 | 143.462 | 69.819 | reject |"));
        assert!(md.contains("Rank used for estimation: 2."));
    }
}
