//! Minimal client for the FRED observations endpoint.

use std::time::Duration;

use serde::Deserialize;

use super::RawSeries;
use crate::error::{Error, Result};
use crate::frame::Period;

pub const FRED_BASE_URL: &str = "https://api.stlouisfed.org/fred";
const API_KEY_VAR: &str = "FRED_API_KEY";

#[derive(Deserialize)]
struct ObservationsBody {
    observations: Vec<Observation>,
}

#[derive(Deserialize)]
struct Observation {
    date: String,
    value: String,
}

#[derive(Deserialize)]
struct ErrorBody {
    #[serde(default)]
    error_message: String,
}

/// Parses an observations response body. Missing values (`.`) are dropped.
pub fn parse_observations(series_id: &str, body: &str) -> Result<RawSeries> {
    let parsed: ObservationsBody =
        serde_json::from_str(body).map_err(|e| Error::Network(format!("unexpected response for {series_id}: {e}")))?;
    let mut obs = Vec::with_capacity(parsed.observations.len());
    for o in parsed.observations {
        let p: Period = o.date.parse()?;
        if o.value == "." || o.value.is_empty() {
            continue;
        }
        let v: f64 = o
            .value
            .parse()
            .map_err(|_| Error::Network(format!("{series_id} {}: bad value `{}`", o.date, o.value)))?;
        obs.push((p, v));
    }
    Ok(RawSeries::new(series_id, obs))
}

pub struct FredClient {
    api_key: String,
    base_url: String,
    agent: ureq::Agent,
}

impl FredClient {
    pub fn new(api_key: impl Into<String>, base_url: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        FredClient {
            api_key: api_key.into(),
            base_url: base_url.into(),
            agent,
        }
    }

    /// Reads the key from `FRED_API_KEY`; fails before any network call if
    /// it is absent or empty.
    pub fn from_env() -> Result<Self> {
        match std::env::var(API_KEY_VAR) {
            Ok(k) if !k.trim().is_empty() => Ok(FredClient::new(k.trim(), FRED_BASE_URL)),
            _ => Err(Error::Auth(format!("{API_KEY_VAR} is not set"))),
        }
    }

    pub fn observations(&self, series_id: &str, window: Option<(Period, Period)>) -> Result<RawSeries> {
        let url = format!("{}/series/observations", self.base_url);
        let mut req = self
            .agent
            .get(&url)
            .query("series_id", series_id)
            .query("api_key", &self.api_key)
            .query("file_type", "json");
        if let Some((a, b)) = window {
            req = req
                .query("observation_start", format!("{a}-01"))
                .query("observation_end", format!("{b}-01"));
        }
        let mut resp = req.call().map_err(|e| Error::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Network(e.to_string()))?;
        match status {
            200 => parse_observations(series_id, &body),
            _ => Err(classify(status, series_id, &body)),
        }
    }
}

fn classify(status: u16, series_id: &str, body: &str) -> Error {
    let msg = serde_json::from_str::<ErrorBody>(body)
        .map(|b| b.error_message)
        .unwrap_or_default();
    let lower = msg.to_lowercase();
    if status == 401 || status == 403 || lower.contains("api_key") || lower.contains("api key") {
        Error::Auth(msg)
    } else if status == 400 && lower.contains("series does not exist") || status == 404 {
        Error::UnknownSeries(series_id.to_string())
    } else {
        Error::Network(format!("HTTP {status}: {msg}"))
    }
}

/// One-shot fetch with the key from the environment.
pub fn fred_fetch(series_id: &str, window: Option<(Period, Period)>) -> Result<RawSeries> {
    FredClient::from_env()?.observations(series_id, window)
}
