//! Pipeline stages. Each returns its canonical JSON document; rendering and
//! file output happen elsewhere.

use cointegrate::data_io::{dgp_simulate, sha256_hex, write_frame_csv, FredClient, RawSeries, Snapshot};
use cointegrate::irf::{irf_bootstrap, IrfResult};
use cointegrate::johansen::{johansen, select_rank, trace_critvals};
use cointegrate::unit_root::adf_values;
use cointegrate::var_select::select_lag;
use cointegrate::vecm::{ec_terms, fit_vecm, VecmModel};
use cointegrate::{Frame, Period};
use serde_json::{json, Value};

use crate::config::{check_subset, ConfigError, PipelineConfig};
use crate::data::Data;
use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

fn doc(kind: &str, data: &Data, body: Value) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "data": data.provenance(),
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn window_json(w: Option<(Period, Period)>) -> Value {
    match w {
        Some((a, b)) => json!({"from": a, "to": b}),
        None => Value::Null,
    }
}

/// Data-dependent checks, run before any computation.
pub fn validate_with_data(config: &PipelineConfig, data: &Data) -> Result<(), ConfigError> {
    let columns = data.columns();
    let system = config.system(&columns);
    check_subset("johansen.variables", &system, &columns)?;
    check_subset("lagselect.variables", &config.lag_variables(&columns), &columns)?;
    config.validate_system(&system)?;
    for s in &config.adf.series {
        if resolve_series(config, s, &columns).is_none() {
            return Err(ConfigError::new("adf.series", format!("unknown series `{s}`")));
        }
    }
    Ok(())
}

/// Column for a column name or a dataset series id.
fn resolve_series(config: &PipelineConfig, s: &str, columns: &[String]) -> Option<String> {
    if columns.iter().any(|c| c == s) {
        return Some(s.to_string());
    }
    config
        .dataset
        .entries
        .iter()
        .find(|e| e.series_id == s && columns.contains(&e.column_name))
        .map(|e| e.column_name.clone())
}

pub fn describe(config: &PipelineConfig, data: &Data) -> Value {
    let window = config.window.describe;
    doc(
        "describe",
        data,
        json!({
            "window": window_json(window),
            "rows": data.describe(window),
        }),
    )
}

pub fn adf_doc(config: &PipelineConfig, data: &Data) -> Result<Value, Failure> {
    let columns = data.columns();
    let names: Vec<String> = if config.adf.series.is_empty() {
        columns.clone()
    } else {
        config
            .adf
            .series
            .iter()
            .filter_map(|s| resolve_series(config, s, &columns))
            .collect()
    };
    let window = config.window.describe;
    let mut rows = Vec::with_capacity(names.len());
    for n in &names {
        let obs = data.observations(n, window);
        let (Some(first), Some(last)) = (obs.first(), obs.last()) else {
            return Err(Failure::Compute(cointegrate::Error::InvalidSeries {
                name: n.clone(),
                reason: "no observations in window".into(),
            }));
        };
        let gaps = first.0.months_until(&last.0) as usize + 1 - obs.len();
        let values: Vec<f64> = obs.iter().map(|o| o.1).collect();
        let r = adf_values(&values, config.adf.regression, config.adf.max_lag, config.adf.lag_choice)?;
        let mut row = json!({"series": n, "start": first.0, "end": last.0, "n_obs": obs.len(), "missing_months": gaps});
        if let (Value::Object(m), Value::Object(b)) = (&mut row, serde_json::to_value(&r)?) {
            m.extend(b);
        }
        rows.push(row);
    }
    Ok(doc(
        "adf",
        data,
        json!({
            "window": window_json(window),
            "regression": config.adf.regression,
            "lag_choice": config.adf.lag_choice,
            "rows": rows,
        }),
    ))
}

pub fn lagselect_doc(config: &PipelineConfig, data: &Data) -> Result<Value, Failure> {
    let vars = config.lag_variables(&data.columns());
    let frame = data.frame(&vars, config.window.estimation)?;
    let sel = select_lag(&frame, config.lagselect.p_max)?;
    Ok(doc(
        "lagselect",
        data,
        json!({
            "variables": vars,
            "start": frame.start(),
            "end": frame.end(),
            "p_max": sel.p_max,
            "n_obs": sel.n_obs,
            "rows": sel.rows,
            "chosen": sel.chosen,
        }),
    ))
}

/// The system frame in Cholesky order.
pub fn system_frame(config: &PipelineConfig, data: &Data) -> Result<Frame, Failure> {
    let system = config.system(&data.columns());
    let order = config.irf.ordering.clone().unwrap_or(system);
    Ok(data.frame(&order, config.window.estimation)?)
}

pub fn johansen_doc(config: &PipelineConfig, data: &Data) -> Result<Value, Failure> {
    let frame = system_frame(config, data)?;
    let j = johansen(&frame, config.johansen.lag_diff, config.johansen.det_spec)?;
    let k = j.k();
    let rows: Vec<Value> = (0..k)
        .map(|r| {
            let cv = trace_critvals(k - r, j.det_spec).ok();
            json!({
                "null": format!("r <= {r}"),
                "r": r,
                "eigenvalue": j.eigenvalues[r],
                "trace": j.trace_stats[r],
                "cv90": cv.map(|c| c.p90),
                "cv95": j.crit_values_95[r],
                "cv99": cv.map(|c| c.p99),
                "reject_5pct": j.trace_stats[r] > j.crit_values_95[r],
            })
        })
        .collect();
    Ok(doc(
        "johansen",
        data,
        json!({
            "variables": frame.names(),
            "start": frame.start(),
            "end": frame.end(),
            "lag_diff": j.lag_diff,
            "det_spec": j.det_spec,
            "n_obs_effective": j.n_obs_effective,
            "selected_rank": j.selected_rank,
            "imposed_rank": config.johansen.rank,
            "rows": rows,
            "eigenvectors": serde_json::to_value(&j)?["eigenvectors"].clone(),
        }),
    ))
}

pub struct Fitted {
    pub frame: Frame,
    pub model: VecmModel,
    pub selected_rank: usize,
}

pub fn fit(config: &PipelineConfig, data: &Data) -> Result<Fitted, Failure> {
    let frame = system_frame(config, data)?;
    let j = johansen(&frame, config.johansen.lag_diff, config.johansen.det_spec)?;
    let rank = select_rank(&j, config.johansen.rank)?;
    if rank == 0 {
        return Err(Failure::Compute(cointegrate::Error::RankInvalid { rank, k: j.k() }));
    }
    let model = fit_vecm(&frame, rank, config.johansen.lag_diff, config.vecm.det_spec)?;
    Ok(Fitted {
        frame,
        model,
        selected_rank: j.selected_rank,
    })
}

pub fn vecm_doc(config: &PipelineConfig, data: &Data, fitted: &Fitted) -> Result<Value, Failure> {
    let ec = ec_terms(&fitted.model, &fitted.frame)?;
    let mut ec_adf = Vec::new();
    for (j, name) in ec.names.iter().enumerate() {
        let v: Vec<f64> = ec.values.column(j).iter().copied().collect();
        let r = adf_values(&v, config.adf.regression, config.adf.max_lag, config.adf.lag_choice)?;
        let mut row = json!({"series": name});
        if let (Value::Object(m), Value::Object(b)) = (&mut row, serde_json::to_value(&r)?) {
            m.extend(b);
        }
        ec_adf.push(row);
    }
    Ok(doc(
        "vecm",
        data,
        json!({
            "rank_source": if config.johansen.rank.is_some() { "config" } else { "trace_test" },
            "selected_rank": fitted.selected_rank,
            "beta_rows": fitted.model.beta_row_names(),
            "model": fitted.model,
            "ec_adf": ec_adf,
        }),
    ))
}

pub fn irf_doc(data: &Data, result: &IrfResult, model_source: Value) -> Value {
    doc(
        "irf",
        data,
        json!({
            "model": model_source,
            "horizon": result.horizon,
            "ordering": result.ordering,
            "level": result.level,
            "n_boot": result.n_boot,
            "seed": result.seed,
            "method": result.method,
            "failed_replications": result.failed_replications,
            "rows": result.rows(),
        }),
    )
}

/// Rows `from..=to` of a frame.
fn slice(frame: &Frame, from: Period, to: Period) -> Result<Frame, Failure> {
    if from < frame.start() || to > frame.end() {
        return Err(Failure::Compute(cointegrate::Error::InvalidArgument(format!(
            "data cover {}..{}, the model needs {from}..{to}",
            frame.start(),
            frame.end()
        ))));
    }
    let a = frame.start().months_until(&from) as usize;
    let n = from.months_until(&to) as usize + 1;
    Ok(Frame::new(frame.names().to_vec(), from, frame.data().rows(a, n).into_owned())?)
}

pub fn load_model(path: &std::path::Path) -> Result<(VecmModel, String), Failure> {
    let bytes = std::fs::read(path).map_err(|_| Failure::Compute(cointegrate::Error::MissingFile(path.display().to_string())))?;
    let model: VecmModel = serde_json::from_slice(&bytes).map_err(cointegrate::Error::from)?;
    if model.schema_version != cointegrate::vecm::MODEL_SCHEMA_VERSION {
        return Err(Failure::Compute(cointegrate::Error::InvalidArgument(format!(
            "unsupported model schema_version {}",
            model.schema_version
        ))));
    }
    Ok((model, sha256_hex(&bytes)))
}

/// Impulse responses of a saved model on the frame it was estimated from.
pub fn irf_from_model(config: &PipelineConfig, data: &Data, path: &std::path::Path) -> Result<Value, Failure> {
    let (model, hash) = load_model(path)?;
    if let Some(o) = &config.irf.ordering {
        if o != &model.names {
            return Err(Failure::Config(ConfigError::new(
                "irf.ordering",
                format!("a saved model fixes the ordering to {}", model.names.join(", ")),
            )));
        }
    }
    let from = model.sample.start.add_months(-(model.lag_diff as i64 + 1));
    let full = data.frame(&model.names, Some((from, model.sample.end)))?;
    let frame = slice(&full, from, model.sample.end)?;
    let r = irf_bootstrap(&model, &frame, config.irf.horizon, config.irf.n_boot, config.irf.seed, config.irf.level)?;
    Ok(irf_doc(data, &r, json!({"source": "file", "sha256": hash})))
}

pub fn irf_fitted(config: &PipelineConfig, data: &Data, fitted: &Fitted) -> Result<Value, Failure> {
    let r = irf_bootstrap(
        &fitted.model,
        &fitted.frame,
        config.irf.horizon,
        config.irf.n_boot,
        config.irf.seed,
        config.irf.level,
    )?;
    Ok(irf_doc(data, &r, json!({"source": "fitted", "rank": fitted.model.rank})))
}

pub fn simulate_csv(config: &PipelineConfig) -> Result<Vec<u8>, Failure> {
    let frame = dgp_simulate(&config.simulate.dgp)?;
    let mut out = Vec::new();
    write_frame_csv(&mut out, &frame)?;
    Ok(out)
}

/// Downloads every dataset series into a new snapshot.
pub fn fetch(config: &PipelineConfig) -> Result<Value, Failure> {
    let client = FredClient::from_env()?;
    let raw = config
        .dataset
        .entries
        .iter()
        .map(|e| client.observations(&e.series_id, None))
        .collect::<cointegrate::Result<Vec<RawSeries>>>()?;
    let now = time::OffsetDateTime::now_utc();
    let stamp = now
        .format(&time::format_description::well_known::Rfc3339)
        .map_err(|e| Failure::Compute(cointegrate::Error::InvalidArgument(e.to_string())))?;
    let vintage = stamp[..10].to_string();
    let dir = crate::data::snapshot_dir(config);
    let snap = Snapshot::write(&dir, &vintage, &stamp, &raw)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "fetch",
        "directory": dir,
        "vintage": vintage,
        "manifest_sha256": snap.manifest_sha256,
        "series": snap.manifest.series,
    }))
}
