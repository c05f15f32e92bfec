//! CSV tables, PGM images and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::numerics::Matrix;

/// One output artifact, relative to the run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutputFile {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        OutputFile {
            name: name.into(),
            bytes,
        }
    }
}

/// Comma-separated table with a header row. Numbers use 17 significant digits.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    text: String,
}

/// A CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            columns: header.len(),
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        assert_eq!(
            cells.len(),
            self.columns,
            "CSV row width differs from header"
        );
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => fmt_f64(v),
                Cell::Text(s) => s,
            })
            .collect();
        let _ = writeln!(self.text, "{}", line.join(","));
        self
    }

    pub fn into_file(self, name: &str) -> OutputFile {
        OutputFile::new(name, self.text.into_bytes())
    }
}

/// Binary 8-bit PGM (`P5`); each value is `round(255·v)` after clamping to `[0, 1]`.
pub fn pgm_bytes(rows: usize, cols: usize, pixels: &[f64]) -> Result<Vec<u8>> {
    if pixels.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::dim(format!(
            "{} pixels for a {rows}x{cols} image",
            pixels.len()
        )));
    }
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(
        pixels
            .iter()
            .map(|&v| (255.0 * v.clamp(0.0, 1.0)).round() as u8),
    );
    Ok(out)
}

/// Heatmap of a matrix with per-matrix min-max scaling.
pub fn heatmap_pgm(m: &Matrix) -> Result<Vec<u8>> {
    let lo = m.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m
        .as_slice()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let scaled: Vec<f64> = m
        .as_slice()
        .iter()
        .map(|&v| if range > 0.0 { (v - lo) / range } else { 0.0 })
        .collect();
    pgm_bytes(m.rows(), m.cols(), &scaled)
}

/// Writes `bytes` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path)?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Manifest text: metadata as `#` comments followed by the full configuration,
/// so the manifest itself can be passed back as `--config`.
pub fn manifest_text(command: &str, cfg: &ExperimentConfig, files: &[OutputFile]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# command = {command}");
    let _ = writeln!(s, "# dkae_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# config_sha256 = {}", cfg.hash());
    let _ = writeln!(s, "# seed = {}", cfg.seed);
    for f in files {
        let _ = writeln!(s, "# output {} sha256 = {}", f.name, sha256_hex(&f.bytes));
    }
    s.push_str(&cfg.to_text());
    s
}

/// Writes every file plus `manifest.txt` into `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    files: &[OutputFile],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::from(e).context(format!("creating {}", dir.display())))?;
    let mut written = Vec::with_capacity(files.len() + 1);
    for f in files {
        let path = dir.join(&f.name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        write_atomic(&path, &f.bytes)
            .map_err(|e| e.context(format!("writing {}", path.display())))?;
        written.push(path);
    }
    let manifest = dir.join("manifest.txt");
    write_atomic(&manifest, manifest_text(command, cfg, files).as_bytes())?;
    written.push(manifest);
    Ok(written)
}
