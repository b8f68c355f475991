//! Source tree scanning and method extraction.

use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use methagg_core::metrics::{extract_source, MethodMetrics};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::report::sha256_hex;

pub const DEFAULT_INCLUDE: [&str; 2] = ["**/*.java", "**/*.c"];

/// Forward slashes, no empty or `.` segments, `..` folded where possible.
pub fn normalize_path(p: &str) -> String {
    let p = p.replace('\\', "/");
    let absolute = p.starts_with('/');
    let mut parts: Vec<&str> = Vec::new();
    for seg in p.split('/') {
        match seg {
            "" | "." => {}
            ".." if parts.last().is_some_and(|l| *l != "..") => {
                parts.pop();
            }
            ".." if absolute => {}
            s => parts.push(s),
        }
    }
    let joined = parts.join("/");
    if absolute { format!("/{joined}") } else { joined }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Normalized path relative to the corpus root.
    pub rel: String,
    pub path: PathBuf,
}

fn glob_set(patterns: &[String]) -> Result<GlobSet> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        b.add(Glob::new(p).map_err(|e| Error::Usage(format!("bad glob {p:?}: {e}")))?);
    }
    b.build().map_err(|e| Error::Usage(e.to_string()))
}

/// Files under `root` matching an include glob and no exclude glob, sorted by
/// relative path. Symbolic links are not followed.
pub fn scan_corpus(root: &Path, include: &[String], exclude: &[String]) -> Result<Vec<SourceFile>> {
    if !root.is_dir() {
        return Err(Error::Usage(format!("corpus root {} is not a directory", root.display())));
    }
    let inc = glob_set(include)?;
    let exc = glob_set(exclude)?;
    let mut out = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| Error::Run(format!("scanning {}: {e}", root.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel = normalize_path(&rel.to_string_lossy());
        if inc.is_match(&rel) && !exc.is_match(&rel) {
            out.push(SourceFile { rel, path: entry.into_path() });
        }
    }
    out.sort_by(|a, b| a.rel.cmp(&b.rel));
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub methods: Vec<MethodMetrics>,
    /// (relative path, SHA-256) of every file read.
    pub digests: Vec<(String, String)>,
    /// Files that failed to parse, with the reason; their methods are absent.
    pub skipped: Vec<(String, String)>,
}

pub fn extract_files(files: &[SourceFile]) -> Result<Extraction> {
    let mut ex = Extraction::default();
    for f in files {
        let bytes = fs::read(&f.path).map_err(|e| Error::io(&f.path, e))?;
        ex.digests.push((f.rel.clone(), sha256_hex(&bytes)));
        let text = String::from_utf8_lossy(&bytes);
        match extract_source(&f.rel, &text) {
            Ok(ms) => ex.methods.extend(ms),
            Err(e) => ex.skipped.push((f.rel.clone(), e.error.to_string())),
        }
    }
    Ok(ex)
}
