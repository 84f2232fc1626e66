//! Output documents and atomic file writing.
//!
//! Numbers go out in shortest round-trip decimal form (both in CSV and
//! JSON), so re-reading reproduces the binary values exactly.

use crate::config::{GridConfig, SeedConfig};
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use susy_chain::{count_poles, well_census_sample, GridSample, Well};

#[derive(Debug, Serialize)]
pub struct PoleDto {
    pub x: f64,
    pub kind: String,
    pub level: usize,
    pub removable: bool,
}

#[derive(Debug, Serialize)]
pub struct WellDto {
    pub x: f64,
    pub depth: f64,
}

/// Chain metadata and census written next to the grid data.
#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub seeds: Vec<SeedConfig>,
    pub energies: Vec<f64>,
    pub order: usize,
    pub grid: GridConfig,
    pub poles: Vec<PoleDto>,
    pub pole_count: usize,
    pub pole_locations: Vec<f64>,
    pub wells: Vec<WellDto>,
}

#[derive(Debug, Serialize)]
pub struct PointDto {
    pub x: f64,
    /// `null` where the evaluation is singular.
    pub v: Option<f64>,
    pub is_singular: bool,
    pub pole_kind: String,
}

#[derive(Debug, Serialize)]
pub struct GridDocument {
    #[serde(flatten)]
    pub sidecar: Sidecar,
    pub points: Vec<PointDto>,
}

pub fn sidecar(seeds: &[SeedConfig], grid: GridConfig, sample: &GridSample) -> Sidecar {
    let census = count_poles(sample);
    let wells: Vec<Well> = well_census_sample(sample);
    Sidecar {
        seeds: seeds.to_vec(),
        energies: sample.energies.clone(),
        order: sample.energies.len(),
        grid,
        poles: sample
            .poles
            .iter()
            .map(|p| PoleDto {
                x: p.x,
                kind: p.kind.label().to_string(),
                level: p.level,
                removable: p.removable,
            })
            .collect(),
        pole_count: census.count,
        pole_locations: census.locations,
        wells: wells
            .iter()
            .map(|w| WellDto {
                x: w.x,
                depth: w.depth,
            })
            .collect(),
    }
}

pub fn points(sample: &GridSample) -> Vec<PointDto> {
    sample
        .xs
        .iter()
        .zip(sample.values.iter())
        .zip(sample.flags.iter())
        .map(|((&x, &v), &flag)| PointDto {
            x,
            v: if v.is_finite() { Some(v) } else { None },
            is_singular: flag != susy_chain::PoleKind::None,
            pole_kind: flag.label().to_string(),
        })
        .collect()
}

/// CSV with header `x,V_n,is_singular,pole_kind`; singular rows carry NaN.
pub fn grid_csv(sample: &GridSample) -> String {
    let mut text = String::with_capacity(32 * sample.len() + 32);
    text.push_str("x,V_n,is_singular,pole_kind\n");
    for ((&x, &v), &flag) in sample
        .xs
        .iter()
        .zip(sample.values.iter())
        .zip(sample.flags.iter())
    {
        let singular = flag != susy_chain::PoleKind::None;
        text.push_str(&format!("{x},{v},{singular},{}\n", flag.label()));
    }
    text
}

/// One parsed row of [`grid_csv`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    /// NaN when the row is singular.
    pub v: f64,
    pub is_singular: bool,
    pub pole_kind: String,
}

/// Reader for [`grid_csv`] output. Values come back bit-identical to what
/// was sampled (shortest round-trip formatting on the way out).
pub fn read_grid_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some("x,V_n,is_singular,pole_kind") => {}
        other => return Err(format!("unexpected CSV header: {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut cols = line.split(',');
            let mut field = || cols.next().ok_or(format!("row {i}: missing column"));
            let x = field()?.parse::<f64>().map_err(|e| format!("row {i}: {e}"))?;
            let v = field()?.parse::<f64>().map_err(|e| format!("row {i}: {e}"))?;
            let is_singular = field()?
                .parse::<bool>()
                .map_err(|e| format!("row {i}: {e}"))?;
            let pole_kind = field()?.to_string();
            if cols.next().is_some() {
                return Err(format!("row {i}: too many columns"));
            }
            Ok(CsvRow {
                x,
                v,
                is_singular,
                pole_kind,
            })
        })
        .collect()
}

pub fn to_json_pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("document serialization cannot fail")
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            std::process::id()
        )),
        None => Path::new(&format!(
            ".{}.tmp-{}",
            path.display(),
            std::process::id()
        ))
        .to_path_buf(),
    };
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        format!("cannot write {}: {e}", path.display())
    })
}

/// Sidecar path for a CSV output: same stem, `.meta.json` extension.
pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    out.with_extension("meta.json")
}
