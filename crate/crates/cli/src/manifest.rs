//! Corpus manifest: JSON lines, one pair per line.
//!
//! Paths are stored relative to the manifest's directory when possible and
//! resolved against it on reading. A no-noise pair stores `snr_db: null`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub clean_path: PathBuf,
    pub distorted_path: PathBuf,
    #[serde(serialize_with = "ser_snr", deserialize_with = "de_snr")]
    pub snr_db: f64,
    pub channel_preset: String,
    pub seed: u64,
}

fn ser_snr<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_snr<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

fn base_dir(manifest: &Path) -> PathBuf {
    match manifest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Records with paths resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRecord>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = base_dir(path);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut r: ManifestRecord = serde_json::from_str(line)
            .map_err(|e| CliError::validation(format!("{}:{}: {e}", path.display(), i + 1)))?;
        for p in [&mut r.clean_path, &mut r.distorted_path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// Write records, rewriting paths relative to the manifest's directory.
pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> CliResult<()> {
    let base = base_dir(path);
    let abs_base = std::path::absolute(&base).map_err(|e| CliError::io(&base, e))?;
    let mut buf = Vec::new();
    for r in records {
        let mut r = r.clone();
        for p in [&mut r.clean_path, &mut r.distorted_path] {
            let abs = std::path::absolute(&*p).map_err(|e| CliError::io(p, e))?;
            if let Some(rel) = pathdiff::diff_paths(&abs, &abs_base) {
                *p = rel;
            }
        }
        serde_json::to_writer(&mut buf, &r).map_err(|e| CliError::runtime(e.to_string()))?;
        buf.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(&buf).map_err(|e| CliError::io(path, e))
}
