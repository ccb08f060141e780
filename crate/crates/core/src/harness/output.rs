use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_LINE: &str = "# schema=v1";

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

/// Writes `rows` as CSV with a header, preceded by the schema comment line.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{SCHEMA_LINE}").map_err(|e| Error::io(path, e))?;
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(|e| Error::io(path, e))
}

/// Reads a CSV written by [`write_csv`], checking the schema line.
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let body = text.strip_prefix(SCHEMA_LINE).ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        reason: format!("missing `{SCHEMA_LINE}` header"),
    })?;
    let mut r = csv::Reader::from_reader(body.trim_start_matches(['\r', '\n']).as_bytes());
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub value: f64,
    pub cdf: f64,
}

/// Empirical CDF: distinct sorted values, each with the fraction of samples
/// at or below it. Repeated values collapse onto their final fraction.
pub fn empirical_cdf(values: &[f64]) -> Result<Vec<CdfPoint>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("CDF values"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Contract("CDF input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<CdfPoint> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let cdf = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.value == v => last.cdf = cdf,
            _ => out.push(CdfPoint { value: v, cdf }),
        }
    }
    Ok(out)
}

/// Writes `cdf_<metric>.csv` under `dir` and returns its path.
pub fn export_cdf(dir: &Path, metric: &str, values: &[f64]) -> Result<PathBuf> {
    let points = empirical_cdf(values)?;
    let path = dir.join(format!("cdf_{metric}.csv"));
    write_csv(&path, &points)?;
    Ok(path)
}

pub fn read_cdf(path: &Path) -> Result<Vec<CdfPoint>> {
    read_csv(path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub files: Vec<ManifestEntry>,
}

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

impl Manifest {
    /// Hashes every file in `files`, which must live under `dir`.
    pub fn build(dir: &Path, command: &str, config_hash: &str, files: &[PathBuf]) -> Result<Self> {
        let mut entries = Vec::with_capacity(files.len());
        for f in files {
            let (sha256, bytes) = sha256_file(f)?;
            let rel = f.strip_prefix(dir).unwrap_or(f);
            entries.push(ManifestEntry {
                path: rel.to_string_lossy().replace('\\', "/"),
                sha256,
                bytes,
            });
        }
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: version_string(),
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            files: entries,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}
