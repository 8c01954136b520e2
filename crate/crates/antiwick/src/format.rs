//! Field and kernel files: a JSON manifest next to a raw binary of
//! interleaved little-endian `f64` pairs `(re, im)` in row-major order.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use antiwick_core::quantize::DenseKernel;
use antiwick_core::{Complex64, Grid, SampledField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const LAYOUT: &str = "row-major";
pub const DTYPE: &str = "complex128-le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldManifest {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub layout: String,
    pub dtype: String,
    /// Binary file, relative to the manifest.
    pub data: String,
    /// `[rows, cols]` for kernels; absent for fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
}

impl FieldManifest {
    fn new(grid: &Grid, data: String, shape: Option<Vec<usize>>) -> Self {
        Self {
            dim: grid.dim(),
            n: grid.points_per_axis(),
            l: grid.half_extent(),
            layout: LAYOUT.into(),
            dtype: DTYPE.into(),
            data,
            shape,
        }
    }

    pub fn grid(&self) -> CliResult<Grid> {
        Ok(Grid::new(self.dim, self.n, self.l)?)
    }

    fn check(&self) -> CliResult<()> {
        if self.layout != LAYOUT {
            return Err(CliError::Format(format!("unsupported layout {:?}", self.layout)));
        }
        if self.dtype != DTYPE {
            return Err(CliError::Format(format!("unsupported dtype {:?}", self.dtype)));
        }
        Ok(())
    }
}

/// `<stem>.json`, `<stem>.bin`, `<stem>.csv` and friends.
pub fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::json(path.display().to_string(), e))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path.display().to_string(), e))
}

fn encode(values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 16);
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn decode(bytes: &[u8], expected: usize, path: &Path) -> CliResult<Vec<Complex64>> {
    if bytes.len() != expected * 16 {
        return Err(CliError::Format(format!(
            "{}: expected {} bytes, found {}",
            path.display(),
            expected * 16,
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

fn bin_name(stem: &Path) -> String {
    with_suffix(stem, ".bin")
        .file_name()
        .expect("stem has a file name")
        .to_string_lossy()
        .into_owned()
}

fn write_raw(stem: &Path, grid: &Grid, values: &[Complex64], shape: Option<Vec<usize>>) -> CliResult<Vec<PathBuf>> {
    let bin = with_suffix(stem, ".bin");
    let json = with_suffix(stem, ".json");
    write_bytes(&bin, &encode(values))?;
    write_json(&json, &FieldManifest::new(grid, bin_name(stem), shape))?;
    Ok(vec![json, bin])
}

fn read_raw(manifest_path: &Path) -> CliResult<(FieldManifest, Vec<u8>)> {
    let m: FieldManifest = read_json(manifest_path)?;
    m.check()?;
    let bin = manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&m.data);
    let bytes = fs::read(&bin).map_err(|e| CliError::io(&bin, e))?;
    Ok((m, bytes))
}

/// Writes `<stem>.json` and `<stem>.bin`; returns the paths written.
pub fn write_field(stem: &Path, field: &SampledField) -> CliResult<Vec<PathBuf>> {
    write_raw(stem, field.grid(), field.values(), None)
}

pub fn read_field(manifest_path: &Path) -> CliResult<SampledField> {
    let (m, bytes) = read_raw(manifest_path)?;
    if m.shape.is_some() {
        return Err(CliError::Format(format!(
            "{} describes a kernel, not a field",
            manifest_path.display()
        )));
    }
    let grid = m.grid()?;
    let values = decode(&bytes, grid.len(), manifest_path)?;
    Ok(SampledField::new(grid, values)?)
}

/// Kernel manifests carry the position grid and `shape = [M, M]`.
pub fn write_kernel(stem: &Path, kernel: &DenseKernel) -> CliResult<Vec<PathBuf>> {
    let m = kernel.size();
    write_raw(stem, kernel.grid(), kernel.matrix(), Some(vec![m, m]))
}

pub fn read_kernel(manifest_path: &Path) -> CliResult<DenseKernel> {
    let (m, bytes) = read_raw(manifest_path)?;
    let grid = m.grid()?;
    let size = grid.len();
    match m.shape.as_deref() {
        Some([r, c]) if *r == size && *c == size => {}
        _ => {
            return Err(CliError::Format(format!(
                "{}: kernel shape must be [{size}, {size}]",
                manifest_path.display()
            )))
        }
    }
    let values = decode(&bytes, size * size, manifest_path)?;
    Ok(DenseKernel::new(grid, values)?)
}

/// Node coordinates followed by `re,im`, one row per node (`d ≤ 2`).
pub fn write_csv(path: &Path, field: &SampledField) -> CliResult<()> {
    let grid = field.grid();
    let d = grid.dim();
    if d > 2 {
        return Err(CliError::Usage("CSV export supports dim ≤ 2".into()));
    }
    let mut out = String::new();
    let header: Vec<String> = (0..d).map(|a| format!("x{a}")).collect();
    out.push_str(&header.join(","));
    out.push_str(",re,im\n");
    let mut p = vec![0.0; d];
    for (k, v) in field.values().iter().enumerate() {
        grid.point(k, &mut p);
        for x in &p {
            out.push_str(&format!("{x:e},"));
        }
        out.push_str(&format!("{:e},{:e}\n", v.re, v.im));
    }
    write_bytes(path, out.as_bytes())
}
