//! Report bundles, run manifests and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use methagg_core::filtering::FilterConfig;
use methagg_core::study::{CvPlan, JoinStats};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digest256 {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub cluster: f64,
    pub redundancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub methagg: &'static str,
    pub methagg_core: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub seed: Option<u64>,
    pub thresholds: Thresholds,
    pub cv: CvPlan,
    pub log1p: bool,
    pub versions: Versions,
    pub dataset: String,
    pub inputs: Vec<Digest256>,
    pub join: Option<JoinStats>,
    pub skipped_files: Vec<Skipped>,
    pub gaps: Vec<String>,
    pub warnings: Vec<String>,
    pub outputs: Vec<Digest256>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, filter: &FilterConfig, cv: CvPlan, log1p: bool) -> Self {
        Manifest {
            command: command.to_string(),
            seed,
            thresholds: Thresholds { cluster: filter.cluster_threshold, redundancy: filter.redundancy_cutoff },
            cv,
            log1p,
            versions: Versions { methagg: env!("CARGO_PKG_VERSION"), methagg_core: methagg_core::VERSION },
            dataset: String::new(),
            inputs: Vec::new(),
            join: None,
            skipped_files: Vec::new(),
            gaps: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

pub const MANIFEST: &str = "run_manifest.json";

/// Write every `(name, contents)` into `dir`, then the manifest listing
/// their digests.
pub fn write_bundle(dir: &Path, files: &[(String, String)], mut manifest: Manifest) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    manifest.outputs.clear();
    for (name, text) in files {
        write_atomic(&dir.join(name), text.as_bytes())?;
        manifest.outputs.push(Digest256 { path: name.clone(), sha256: sha256_hex(text.as_bytes()) });
    }
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Run(e.to_string()))?;
    json.push('\n');
    write_atomic(&dir.join(MANIFEST), json.as_bytes())?;
    Ok(manifest)
}
