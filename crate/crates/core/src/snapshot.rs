//! Field snapshots: a little-endian binary file (`u64` n, `u64` N, then
//! `N^{2n}` `f64` values in row-major grid order) and a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::TorusGrid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub field: String,
    pub n: usize,
    pub points: usize,
    pub len: usize,
    #[serde(default)]
    pub extra: serde_json::Value,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode(grid: &TorusGrid, values: &[f64]) -> Result<Vec<u8>> {
    if values.len() != grid.len() {
        return Err(LabError::DimensionMismatch { expected: grid.len(), got: values.len() });
    }
    let mut out = Vec::with_capacity(16 + 8 * values.len());
    out.extend_from_slice(&(grid.n as u64).to_le_bytes());
    out.extend_from_slice(&(grid.points as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<(TorusGrid, Vec<f64>)> {
    let word = |i: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * i..8 * i + 8)
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| LabError::InvalidParameter("truncated snapshot".into()))
    };
    let n = u64::from_le_bytes(word(0)?) as usize;
    let points = u64::from_le_bytes(word(1)?) as usize;
    let grid = TorusGrid::new(n, points)?;
    if bytes.len() != 16 + 8 * grid.len() {
        return Err(LabError::InvalidParameter(format!(
            "snapshot holds {} bytes, expected {}",
            bytes.len(),
            16 + 8 * grid.len()
        )));
    }
    let values = bytes[16..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((grid, values))
}

/// Writes `path` and `path.json`.
pub fn write_snapshot(
    path: &Path,
    field: &str,
    grid: &TorusGrid,
    values: &[f64],
    extra: serde_json::Value,
) -> Result<()> {
    fs::write(path, encode(grid, values)?)?;
    let meta = SnapshotMeta { field: field.into(), n: grid.n, points: grid.points, len: values.len(), extra };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(TorusGrid, Vec<f64>, Option<SnapshotMeta>)> {
    let (grid, values) = decode(&fs::read(path)?)?;
    let side = sidecar_path(path);
    let meta = if side.exists() { Some(serde_json::from_str(&fs::read_to_string(side)?)?) } else { None };
    Ok((grid, values, meta))
}
