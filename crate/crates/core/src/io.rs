//! Grid files and characteristic-sample files.
//!
//! A grid is stored as a JSON manifest next to a CSV payload. The manifest
//! names the payload relative to its own directory:
//!
//! ```json
//! {"kind": "optical", "x_min": -7.0, "x_max": 7.0, "n_x": 281, "n_theta": 64, "data": "w.csv"}
//! ```
//!
//! Optical payloads hold one `theta` row per line, Wigner payloads one `q`
//! row per line; values are comma separated. For Wigner grids `x_min`/`x_max`
//! bound `q`, and `p_min`/`p_max` default to the same interval.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, OpticalTomogramGrid, PhaseGridSpec, WignerGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Optical,
    Wigner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridManifest {
    pub kind: GridKind,
    pub x_min: f64,
    pub x_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    pub data: String,
}

/// A grid read from disk.
#[derive(Debug, Clone)]
pub enum LoadedGrid {
    Optical(OpticalTomogramGrid),
    Wigner(WignerGrid),
}

fn require(field: Option<usize>, name: &str) -> Result<usize> {
    field.ok_or_else(|| Error::GridFile(format!("manifest is missing `{name}`")))
}

fn symmetric(lo: f64, hi: f64, axis: &str) -> Result<f64> {
    if (lo + hi).abs() > 1e-12 * hi.abs().max(1.0) {
        return Err(Error::GridFile(format!("{axis} range [{lo}, {hi}] must be symmetric about 0")));
    }
    Ok(hi)
}

impl GridManifest {
    pub fn optical(spec: &GridSpec, data: impl Into<String>) -> Self {
        Self {
            kind: GridKind::Optical,
            x_min: spec.x_min(),
            x_max: spec.x_max,
            n_x: Some(spec.n_x),
            n_theta: Some(spec.n_theta),
            n_q: None,
            n_p: None,
            p_min: None,
            p_max: None,
            data: data.into(),
        }
    }

    pub fn wigner(spec: &PhaseGridSpec, data: impl Into<String>) -> Self {
        Self {
            kind: GridKind::Wigner,
            x_min: -spec.q_max,
            x_max: spec.q_max,
            n_x: None,
            n_theta: None,
            n_q: Some(spec.n_q),
            n_p: Some(spec.n_p),
            p_min: Some(-spec.p_max),
            p_max: Some(spec.p_max),
            data: data.into(),
        }
    }

    pub fn optical_spec(&self) -> Result<GridSpec> {
        let x_max = symmetric(self.x_min, self.x_max, "x")?;
        GridSpec::new(x_max, require(self.n_x, "n_x")?, require(self.n_theta, "n_theta")?)
    }

    pub fn phase_spec(&self) -> Result<PhaseGridSpec> {
        let q_max = symmetric(self.x_min, self.x_max, "q")?;
        let p_max = symmetric(self.p_min.unwrap_or(self.x_min), self.p_max.unwrap_or(self.x_max), "p")?;
        let spec = PhaseGridSpec { q_max, p_max, n_q: require(self.n_q, "n_q")?, n_p: require(self.n_p, "n_p")? };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_rows(text: &str, rows: usize, cols: usize, source: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::GridFile(format!("{}:{}: not a number: `{}`", source.display(), line_no + 1, field.trim()))
            })?;
            values.push(v);
        }
        if values.len() - before != cols {
            return Err(Error::GridFile(format!(
                "{}:{}: expected {cols} values, found {}",
                source.display(),
                line_no + 1,
                values.len() - before
            )));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(Error::GridFile(format!("{}: expected {rows} rows, found {seen}", source.display())));
    }
    Ok(values)
}

fn format_rows(values: &[f64], cols: usize) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for row in values.chunks(cols) {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:e}");
        }
        out.push('\n');
    }
    out
}

/// Reads a manifest and its payload.
pub fn read_grid(manifest_path: impl AsRef<Path>) -> Result<LoadedGrid> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| Error::GridFile(format!("cannot read {}: {e}", manifest_path.display())))?;
    let manifest: GridManifest = serde_json::from_str(&text)?;
    let data_path = payload_path(manifest_path, &manifest.data);
    let payload = fs::read_to_string(&data_path)
        .map_err(|e| Error::GridFile(format!("cannot read {}: {e}", data_path.display())))?;
    match manifest.kind {
        GridKind::Optical => {
            let spec = manifest.optical_spec()?;
            let values = parse_rows(&payload, spec.n_theta, spec.n_x, &data_path)?;
            Ok(LoadedGrid::Optical(OpticalTomogramGrid::new(spec, values)?))
        }
        GridKind::Wigner => {
            let spec = manifest.phase_spec()?;
            let values = parse_rows(&payload, spec.n_q, spec.n_p, &data_path)?;
            Ok(LoadedGrid::Wigner(WignerGrid::new(spec, values)?))
        }
    }
}

fn payload_path(manifest_path: &Path, data: &str) -> PathBuf {
    let data = Path::new(data);
    if data.is_absolute() {
        data.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or_else(|| Path::new(".")).join(data)
    }
}

fn sibling_csv(manifest_path: &Path) -> (PathBuf, String) {
    let stem = manifest_path.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
    let name = format!("{stem}.csv");
    (payload_path(manifest_path, &name), name)
}

/// Writes `grid` as `<stem>.json` + `<stem>.csv`.
pub fn write_optical(grid: &OpticalTomogramGrid, manifest_path: impl AsRef<Path>) -> Result<()> {
    let manifest_path = manifest_path.as_ref();
    let (csv_path, name) = sibling_csv(manifest_path);
    fs::write(&csv_path, format_rows(grid.values(), grid.spec.n_x))?;
    let manifest = GridManifest::optical(&grid.spec, name);
    fs::write(manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub fn write_wigner(grid: &WignerGrid, manifest_path: impl AsRef<Path>) -> Result<()> {
    let manifest_path = manifest_path.as_ref();
    let (csv_path, name) = sibling_csv(manifest_path);
    fs::write(&csv_path, format_rows(grid.values(), grid.spec.n_p))?;
    let manifest = GridManifest::wigner(&grid.spec, name);
    fs::write(manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// `(mu, nu, re, im)` rows.
pub fn format_characteristic(points: &[(f64, f64)], values: &[Complex64]) -> String {
    let mut out = String::from("mu,nu,re,im\n");
    for ((mu, nu), v) in points.iter().zip(values) {
        let _ = writeln!(out, "{mu:e},{nu:e},{:e},{:e}", v.re, v.im);
    }
    out
}

/// Sample points and values read from a characteristic-function CSV.
pub type CharacteristicSamples = (Vec<(f64, f64)>, Vec<Complex64>);

pub fn parse_characteristic(text: &str) -> Result<CharacteristicSamples> {
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("mu") {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::GridFile(format!("line {}: malformed characteristic row", line_no + 1)))?;
        if fields.len() != 4 {
            return Err(Error::GridFile(format!("line {}: expected mu,nu,re,im", line_no + 1)));
        }
        points.push((fields[0], fields[1]));
        values.push(Complex64::new(fields[2], fields[3]));
    }
    Ok((points, values))
}
