//! Input data for the pipeline: the snapshot (or a live fetch) or a frame
//! CSV.

use std::io::Read;
use std::path::{Path, PathBuf};

use cointegrate::data_io::{apply_transform, read_frame_csv, FredClient, RawSeries, Snapshot};
use cointegrate::frame::describe_values;
use cointegrate::{align, AlignPolicy, DescribeRow, Frame, Period, Result};
use serde::Serialize;

use crate::config::{PipelineConfig, Source};

const SNAPSHOT_ENV: &str = "COINTEGRATE_SNAPSHOT_DIR";

/// Provenance recorded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vintage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
}

pub enum Data {
    /// Series keyed by column name, transforms applied.
    Dataset { raw: Vec<RawSeries>, provenance: Provenance },
    Frame { frame: Frame, provenance: Provenance },
}

pub fn snapshot_dir(config: &PipelineConfig) -> PathBuf {
    if let Some(d) = &config.data.snapshot_dir {
        return d.clone();
    }
    if let Some(d) = std::env::var_os(SNAPSHOT_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(d);
    }
    let local = Path::new("data/snapshot");
    if local.join(cointegrate::data_io::MANIFEST_FILE).exists() {
        return local.to_path_buf();
    }
    workspace_root().join("data/snapshot")
}

fn from_snapshot(config: &PipelineConfig) -> Result<Data> {
    let snap = Snapshot::open(&snapshot_dir(config))?;
    snap.covers(&config.dataset)?;
    let raw = config
        .dataset
        .entries
        .iter()
        .map(|e| {
            let mut t = apply_transform(&snap.read(&e.series_id)?, e);
            t.id = e.column_name.clone();
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Data::Dataset {
        raw,
        provenance: Provenance {
            kind: "snapshot",
            vintage: Some(snap.manifest.vintage.clone()),
            manifest_sha256: Some(snap.manifest_sha256.clone()),
            input_sha256: None,
        },
    })
}

fn from_fred(config: &PipelineConfig) -> Result<Data> {
    let client = FredClient::from_env()?;
    let raw = config
        .dataset
        .entries
        .iter()
        .map(|e| {
            let mut t = apply_transform(&client.observations(&e.series_id, None)?, e);
            t.id = e.column_name.clone();
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Data::Dataset {
        raw,
        provenance: Provenance {
            kind: "fred",
            vintage: None,
            manifest_sha256: None,
            input_sha256: None,
        },
    })
}

pub fn load(config: &PipelineConfig) -> Result<Data> {
    if let Some(input) = &config.data.input {
        let mut bytes = Vec::new();
        if input == "-" {
            std::io::stdin().read_to_end(&mut bytes)?;
        } else {
            bytes = std::fs::read(input).map_err(|_| cointegrate::Error::MissingFile(input.clone()))?;
        }
        let frame = read_frame_csv(bytes.as_slice(), if input == "-" { "<stdin>" } else { input })?;
        return Ok(Data::Frame {
            frame,
            provenance: Provenance {
                kind: "frame_csv",
                vintage: None,
                manifest_sha256: None,
                input_sha256: Some(cointegrate::data_io::sha256_hex(&bytes)),
            },
        });
    }
    match config.data.source {
        Source::Snapshot => from_snapshot(config),
        Source::Fred => from_fred(config).or_else(|e| {
            eprintln!("warning: live fetch failed ({e}); using the snapshot");
            from_snapshot(config)
        }),
    }
}

impl Data {
    pub fn provenance(&self) -> &Provenance {
        match self {
            Data::Dataset { provenance, .. } | Data::Frame { provenance, .. } => provenance,
        }
    }

    pub fn columns(&self) -> Vec<String> {
        match self {
            Data::Dataset { raw, .. } => raw.iter().map(|r| r.id.clone()).collect(),
            Data::Frame { frame, .. } => frame.names().to_vec(),
        }
    }

    /// Each series over its own observations inside the window.
    pub fn describe(&self, window: Option<(Period, Period)>) -> Vec<DescribeRow> {
        match self {
            Data::Dataset { raw, .. } => raw
                .iter()
                .map(|r| {
                    let v: Vec<f64> = r.within(window).into_iter().map(|o| o.1).collect();
                    describe_values(&r.id, &v)
                })
                .collect(),
            Data::Frame { frame, .. } => frame
                .names()
                .iter()
                .map(|n| describe_values(n, &frame.column(n).expect("own column")))
                .collect(),
        }
    }

    /// Observed values of one column inside the window, skipping missing
    /// months.
    pub fn observations(&self, name: &str, window: Option<(Period, Period)>) -> Vec<(Period, f64)> {
        match self {
            Data::Dataset { raw, .. } => raw
                .iter()
                .find(|r| r.id == name)
                .map(|r| r.within(window))
                .unwrap_or_default(),
            Data::Frame { frame, .. } => frame
                .column(name)
                .map(|v| v.into_iter().enumerate().map(|(i, x)| (frame.start().add_months(i as i64), x)).collect())
                .unwrap_or_default(),
        }
    }

    /// Common-sample frame of `names` over the estimation window. Frame
    /// inputs are used as given.
    pub fn frame(&self, names: &[String], window: Option<(Period, Period)>) -> Result<Frame> {
        match self {
            Data::Dataset { raw, .. } => {
                let series = names
                    .iter()
                    .map(|n| {
                        let r = raw.iter().find(|r| &r.id == n).ok_or_else(|| cointegrate::Error::InvalidSeries {
                            name: n.clone(),
                            reason: "not in the dataset".into(),
                        })?;
                        r.to_series(n, window)
                    })
                    .collect::<Result<Vec<_>>>()?;
                align(&series, AlignPolicy::Intersection)
            }
            Data::Frame { frame, .. } => frame.select(names),
        }
    }
}

/// The workspace directory two levels above this crate.
fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).expect("crate inside a workspace").to_path_buf()
}
