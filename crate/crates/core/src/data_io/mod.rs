//! Series files, dataset specifications, the pinned snapshot, the FRED
//! client and synthetic data generation.

mod csv_file;
mod dgp;
mod fred;
mod snapshot;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Period, Series};

pub use csv_file::{read_frame_csv, read_series_csv, write_frame_csv, write_series_csv};
pub use dgp::{dgp_simulate, DgpSpec};
pub use fred::{fred_fetch, parse_observations, FredClient, FRED_BASE_URL};
pub use snapshot::{sha256_hex, Manifest, ManifestEntry, Snapshot, MANIFEST_FILE, MANIFEST_SCHEMA_VERSION};

/// Observations of one source series as published: dated values, possibly
/// with gaps (missing markers and skipped months are both dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub id: String,
    pub observations: Vec<(Period, f64)>,
}

impl RawSeries {
    pub fn new(id: impl Into<String>, mut observations: Vec<(Period, f64)>) -> Self {
        observations.sort_by_key(|o| o.0);
        RawSeries {
            id: id.into(),
            observations,
        }
    }

    pub fn first(&self) -> Option<Period> {
        self.observations.first().map(|o| o.0)
    }

    pub fn last(&self) -> Option<Period> {
        self.observations.last().map(|o| o.0)
    }

    /// Observations with `from <= period <= to`.
    pub fn within(&self, window: Option<(Period, Period)>) -> Vec<(Period, f64)> {
        self.observations
            .iter()
            .filter(|(p, _)| window.is_none_or(|(a, b)| *p >= a && *p <= b))
            .copied()
            .collect()
    }

    /// Contiguous monthly series over the window; ragged ends are trimmed,
    /// a missing month in between is an error.
    pub fn to_series(&self, name: &str, window: Option<(Period, Period)>) -> Result<Series> {
        let obs = self.within(window);
        let Some(&(start, _)) = obs.first() else {
            return Err(Error::InvalidSeries {
                name: name.into(),
                reason: "no observations in window".into(),
            });
        };
        let mut expected = start;
        let mut values = Vec::with_capacity(obs.len());
        for &(p, v) in &obs {
            if p != expected {
                return Err(Error::InternalGap {
                    name: name.into(),
                    period: expected,
                });
            }
            values.push(v);
            expected = expected.succ();
        }
        Series::new(name, start, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Level,
    /// `100 (x_t / x_{t-1} - 1)`.
    PctChange,
    /// Identical to `Level`; kept for configs that name it explicitly.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub series_id: String,
    pub column_name: String,
    #[serde(default)]
    pub transform: Transform,
    /// Multiplier applied after the transform (unit conversion).
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub entries: Vec<SeriesEntry>,
    #[serde(default)]
    pub window: Option<(Period, Period)>,
}

impl DatasetSpec {
    /// The six monthly FRED series. Consumer credit is published in
    /// billions of dollars and rescaled to millions.
    pub fn default_six() -> Self {
        let e = |id: &str, col: &str, scale: f64| SeriesEntry {
            series_id: id.into(),
            column_name: col.into(),
            transform: Transform::Level,
            scale,
        };
        DatasetSpec {
            entries: vec![
                e("TOTALNS", "CREDIT", 1000.0),
                e("UMCSENT", "UMCSENT", 1.0),
                e("FEDFUNDS", "FEDFUNDS", 1.0),
                e("CPIAUCSL", "CPIAUCSL", 1.0),
                e("M2SL", "M2SL", 1.0),
                e("UNRATE", "UNRATE", 1.0),
            ],
            window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::InvalidArgument("dataset has no series".into()));
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if a.series_id == b.series_id {
                    return Err(Error::InvalidArgument(format!("duplicate series_id `{}`", a.series_id)));
                }
                if a.column_name == b.column_name {
                    return Err(Error::InvalidArgument(format!("duplicate column_name `{}`", a.column_name)));
                }
            }
            if !(a.scale.is_finite() && a.scale != 0.0) {
                return Err(Error::InvalidArgument(format!("scale for `{}` must be finite and nonzero", a.series_id)));
            }
        }
        if let Some((a, b)) = self.window {
            if a > b {
                return Err(Error::InvalidArgument(format!("window start {a} after end {b}")));
            }
        }
        Ok(())
    }

    pub fn entry(&self, column: &str) -> Option<&SeriesEntry> {
        self.entries.iter().find(|e| e.column_name == column)
    }
}

/// Applies transform and scale to raw observations. Percent changes are
/// only formed between adjacent months.
pub fn apply_transform(raw: &RawSeries, entry: &SeriesEntry) -> RawSeries {
    let obs = match entry.transform {
        Transform::Level | Transform::None => raw.observations.clone(),
        Transform::PctChange => raw
            .observations
            .windows(2)
            .filter(|w| w[0].0.succ() == w[1].0 && w[0].1 != 0.0)
            .map(|w| (w[1].0, 100.0 * (w[1].1 / w[0].1 - 1.0)))
            .collect(),
    };
    RawSeries {
        id: raw.id.clone(),
        observations: obs.into_iter().map(|(p, v)| (p, v * entry.scale)).collect(),
    }
}

/// Reads `<dir>/<series_id>.csv` for every entry, applies transforms and
/// returns the raw (possibly gappy) observations keyed by column name.
pub fn load_raw(dir: &Path, spec: &DatasetSpec) -> Result<Vec<RawSeries>> {
    spec.validate()?;
    spec.entries
        .iter()
        .map(|e| {
            let raw = read_series_csv(&dir.join(format!("{}.csv", e.series_id)))?;
            let mut t = apply_transform(&raw, e);
            t.id = e.column_name.clone();
            Ok(t)
        })
        .collect()
}

/// Loads every series of `spec` from `dir` as contiguous [`Series`] over
/// the spec window.
pub fn load_csv(dir: &Path, spec: &DatasetSpec) -> Result<Vec<Series>> {
    load_raw(dir, spec)?
        .iter()
        .map(|r| r.to_series(&r.id, spec.window))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(y: i32, m: u32) -> Period {
        Period::new(y, m).unwrap()
    }

    #[test]
    fn gaps_inside_window_are_errors() {
        let raw = RawSeries::new("X", vec![(p(2000, 1), 1.0), (p(2000, 2), 2.0), (p(2000, 4), 4.0)]);
        match raw.to_series("X", None) {
            Err(Error::InternalGap { period, .. }) => assert_eq!(period, p(2000, 3)),
            other => panic!("{other:?}"),
        }
        let s = raw.to_series("X", Some((p(2000, 1), p(2000, 2)))).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
        let s = raw.to_series("X", Some((p(2000, 3), p(2000, 12)))).unwrap();
        assert_eq!(s.start(), p(2000, 4));
    }

    #[test]
    fn pct_change_and_scale() {
        let raw = RawSeries::new("X", vec![(p(2000, 1), 100.0), (p(2000, 2), 110.0), (p(2000, 4), 121.0)]);
        let e = SeriesEntry {
            series_id: "X".into(),
            column_name: "x".into(),
            transform: Transform::PctChange,
            scale: 2.0,
        };
        let t = apply_transform(&raw, &e);
        assert_eq!(t.observations.len(), 1);
        assert_eq!(t.observations[0].0, p(2000, 2));
        assert!((t.observations[0].1 - 20.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let mut s = DatasetSpec::default_six();
        s.validate().unwrap();
        s.entries[1].column_name = "CREDIT".into();
        assert!(s.validate().is_err());
    }
}
