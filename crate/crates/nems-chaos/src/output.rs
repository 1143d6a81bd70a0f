//! Artifact plumbing: CSV assembly, atomic file writes, checksums, manifest.
//!
//! Every artifact is built fully in memory, hashed, then written atomically
//! (temporary file in the target directory + rename), so a crashed run never
//! leaves a truncated CSV behind. The manifest lists each file with its
//! SHA-256 digest; re-running the same configuration must reproduce the
//! digests byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::gformat::format_g17;

/// In-memory CSV being assembled: header row plus `%.17g`-formatted cells.
pub struct Csv {
    name: String,
    buf: String,
    columns: usize,
}

impl Csv {
    /// Starts a CSV with the given file name and header columns.
    pub fn new(name: impl Into<String>, header: &[&str]) -> Csv {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv {
            name: name.into(),
            buf,
            columns: header.len(),
        }
    }

    /// Appends one row of cells. Counts (`n`, lags, flags) go through the
    /// integer path; every real value is `%.17g`-formatted.
    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.columns, "row width mismatch in {}", self.name);
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                Cell::Int(v) => self.buf.push_str(&v.to_string()),
                Cell::Real(x) => self.buf.push_str(&format_g17(*x)),
                Cell::Text(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bytes(&self) -> &[u8] {
        self.buf.as_bytes()
    }
}

/// One CSV cell.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(u64),
    Real(f64),
    /// Bare label (component letters etc.); must not contain commas.
    Text(&'static str),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Real(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Int(u64::from(b))
    }
}

/// Manifest entry for one written artifact.
#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
}

/// Machine-readable record of a completed run: the resolved configuration,
/// the code version, every artifact with its digest, and the wall-clock time.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub config: RunConfig,
    pub files: Vec<FileRecord>,
    pub duration_ms: u64,
}

/// Accumulates artifacts for one run and writes them plus the manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<FileRecord>,
    started: Instant,
}

impl ArtifactWriter {
    /// Creates the output directory (and parents) and probes writability so
    /// an unusable path fails before any computation output is produced.
    pub fn create(dir: &Path) -> Result<ArtifactWriter> {
        fs::create_dir_all(dir).map_err(|e| {
            CliError::config(format!("output directory {}: {e}", dir.display()))
        })?;
        let probe = dir.join(".write-probe");
        fs::write(&probe, b"").map_err(|e| {
            CliError::config(format!("output directory {} is not writable: {e}", dir.display()))
        })?;
        let _ = fs::remove_file(&probe);
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Hashes and atomically writes one CSV, recording it for the manifest.
    pub fn write_csv(&mut self, csv: &Csv) -> Result<()> {
        let digest = hex_sha256(csv.bytes());
        let path = self.dir.join(csv.name());
        write_atomic(&path, csv.bytes())?;
        self.files.push(FileRecord {
            name: csv.name().to_owned(),
            sha256: digest,
        });
        Ok(())
    }

    /// Finalizes the run: writes `manifest.json` and returns the manifest.
    pub fn finish(self, cfg: &RunConfig) -> Result<RunManifest> {
        let manifest = RunManifest {
            experiment: cfg.experiment.name().to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config: cfg.clone(),
            files: self.files,
            duration_ms: self.started.elapsed().as_millis() as u64,
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Runtime(format!("manifest serialization: {e}")))?;
        let path = self.dir.join("manifest.json");
        write_atomic(&path, json.as_bytes())?;
        Ok(manifest)
    }
}

/// Lower-case hex SHA-256 of a byte string.
pub fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write;
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Writes via a sibling temporary file and rename, so readers never observe
/// a partially written artifact.
fn write_atomic(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.clone();
    let mut name = tmp
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))?;
    Ok(())
}
