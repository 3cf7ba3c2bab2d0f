//! On-disk bundle layout shared by ingest outputs and atlases.
//!
//! A bundle is a directory holding line-delimited JSON record files plus a
//! `manifest.json` that names the bundle kind, the format version, and the
//! SHA-256 of every record file. Bundles are written to a sibling temporary
//! directory and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub format_version: u32,
    pub language: String,
    /// File name to hex SHA-256 of its bytes.
    pub files: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn to_jsonl<'a, T: Serialize + 'a>(items: impl IntoIterator<Item = &'a T>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn from_jsonl<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Integrity(format!("invalid UTF-8: {e}")))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).map_err(Error::from)).collect()
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `files` and a manifest for them into `dir`, replacing any
/// previous bundle there.
pub fn write_bundle(
    dir: &Path,
    kind: &str,
    language: &str,
    counts: BTreeMap<String, u64>,
    files: &[(&str, Vec<u8>)],
) -> Result<()> {
    let manifest = Manifest {
        kind: kind.to_string(),
        format_version: FORMAT_VERSION,
        language: language.to_string(),
        files: files.iter().map(|(n, b)| (n.to_string(), sha256_hex(b))).collect(),
        counts,
    };

    let tmp = sibling(dir, "tmp");
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir_all(&tmp)?;
    for (name, bytes) in files {
        fs::write(tmp.join(name), bytes)?;
    }
    fs::write(tmp.join(MANIFEST), to_json_pretty(&manifest)?)?;

    if dir.exists() {
        let old = sibling(dir, "old");
        if old.exists() {
            fs::remove_dir_all(&old)?;
        }
        fs::rename(dir, &old)?;
        fs::rename(&tmp, dir)?;
        fs::remove_dir_all(&old)?;
    } else {
        if let Some(parent) = dir.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::rename(&tmp, dir)?;
    }
    Ok(())
}

/// Reads a bundle, checking its kind, version and every file checksum.
pub fn read_bundle(dir: &Path, kind: &str) -> Result<(Manifest, BTreeMap<String, Vec<u8>>)> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST))?)?;
    if manifest.kind != kind {
        return Err(Error::Integrity(format!("expected a {kind} bundle, found {}", manifest.kind)));
    }
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: manifest.format_version, expected: FORMAT_VERSION });
    }
    let mut files = BTreeMap::new();
    for (name, digest) in &manifest.files {
        let bytes = fs::read(dir.join(name))?;
        if &sha256_hex(&bytes) != digest {
            return Err(Error::Checksum { file: name.clone() });
        }
        files.insert(name.clone(), bytes);
    }
    Ok((manifest, files))
}

pub(crate) fn take_file(files: &mut BTreeMap<String, Vec<u8>>, name: &str) -> Result<Vec<u8>> {
    files.remove(name).ok_or_else(|| Error::Integrity(format!("manifest does not list {name}")))
}

fn sibling(dir: &Path, suffix: &str) -> PathBuf {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    dir.with_file_name(format!(".{name}.{suffix}-{}", std::process::id()))
}
