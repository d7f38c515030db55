//! A pinned set of series files described by `manifest.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::csv_file::{read_series_csv, write_series_csv};
use super::{DatasetSpec, RawSeries};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub series_id: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// Data vintage (the date the source was current), `YYYY-MM-DD`.
    pub vintage: String,
    /// RFC 3339 retrieval timestamp.
    pub retrieved_at: String,
    pub series: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// Hash of the manifest file itself; identifies the snapshot.
    pub manifest_sha256: String,
}

impl Snapshot {
    /// Opens `dir` and verifies every listed file against its hash.
    pub fn open(dir: &Path) -> Result<Snapshot> {
        let mpath = dir.join(MANIFEST_FILE);
        let bytes = std::fs::read(&mpath).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(mpath.display().to_string()),
            _ => Error::Io(e),
        })?;
        let manifest: Manifest = serde_json::from_slice(&bytes)?;
        if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::Manifest(format!(
                "unsupported schema_version {}",
                manifest.schema_version
            )));
        }
        for e in &manifest.series {
            let path = dir.join(&e.file);
            let data = std::fs::read(&path).map_err(|_| Error::MissingFile(path.display().to_string()))?;
            let got = sha256_hex(&data);
            if got != e.sha256 {
                return Err(Error::Manifest(format!(
                    "{} hash mismatch: manifest {}, file {}",
                    e.file, e.sha256, got
                )));
            }
        }
        Ok(Snapshot {
            dir: dir.to_path_buf(),
            manifest,
            manifest_sha256: sha256_hex(&bytes),
        })
    }

    pub fn entry(&self, series_id: &str) -> Option<&ManifestEntry> {
        self.manifest.series.iter().find(|e| e.series_id == series_id)
    }

    /// Checks that every series of `spec` is in the manifest.
    pub fn covers(&self, spec: &DatasetSpec) -> Result<()> {
        for e in &spec.entries {
            if self.entry(&e.series_id).is_none() {
                return Err(Error::Manifest(format!("series {} not in snapshot", e.series_id)));
            }
        }
        Ok(())
    }

    pub fn read(&self, series_id: &str) -> Result<RawSeries> {
        let e = self
            .entry(series_id)
            .ok_or_else(|| Error::Manifest(format!("series {series_id} not in snapshot")))?;
        read_series_csv(&self.dir.join(&e.file))
    }

    /// Writes `series` as `<id>.csv` files plus a manifest into `dir`.
    pub fn write(dir: &Path, vintage: &str, retrieved_at: &str, series: &[RawSeries]) -> Result<Snapshot> {
        std::fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(series.len());
        for s in series {
            let file = format!("{}.csv", s.id);
            let path = dir.join(&file);
            write_series_csv(&path, s)?;
            entries.push(ManifestEntry {
                series_id: s.id.clone(),
                file,
                sha256: sha256_hex(&std::fs::read(&path)?),
            });
        }
        let manifest = Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            vintage: vintage.into(),
            retrieved_at: retrieved_at.into(),
            series: entries,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Snapshot::open(dir)
    }
}
