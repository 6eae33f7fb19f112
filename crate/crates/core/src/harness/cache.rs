//! On-disk cache for reference solutions, keyed by a SHA-256 of a descriptor.
//!
//! The directory is `$LINSTAB_CACHE_DIR`, or `linstab-cache` under the system
//! temporary directory when unset. An empty value disables caching.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "LINSTAB_CACHE_DIR";

pub fn cache_dir() -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if v.is_empty() => None,
        Some(v) => Some(PathBuf::from(v)),
        None => Some(std::env::temp_dir().join("linstab-cache")),
    }
}

pub fn key(descriptor: &str) -> String {
    Sha256::digest(descriptor.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn encode(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 * (values.len() + 1));
    out.extend((values.len() as u64).to_le_bytes());
    for v in values {
        out.extend(v.to_le_bytes());
    }
    out
}

fn decode(bytes: &[u8]) -> Option<Vec<f64>> {
    let n = u64::from_le_bytes(bytes.get(..8)?.try_into().ok()?) as usize;
    if bytes.len() != 8 * (n + 1) {
        return None;
    }
    Some(
        bytes[8..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    )
}

/// Returns the cached vector for `descriptor` in `dir`, or computes and stores it.
pub fn cached_in(dir: Option<&Path>, descriptor: &str, compute: impl FnOnce() -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let Some(dir) = dir else {
        return compute();
    };
    let path = dir.join(format!("{}.bin", key(descriptor)));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Some(v) = decode(&bytes) {
            return Ok(v);
        }
    }
    let v = compute()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    // Write then rename so concurrent readers never see a partial file.
    let tmp = dir.join(format!("{}.{}.tmp", key(descriptor), std::process::id()));
    std::fs::write(&tmp, encode(&v)).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(v)
}

pub fn cached(descriptor: &str, compute: impl FnOnce() -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    cached_in(cache_dir().as_deref(), descriptor, compute)
}
