//! Run settings: a `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use methagg_core::filtering::FilterConfig;
use methagg_core::study::{CvPlan, StudyConfig};

use crate::corpus::DEFAULT_INCLUDE;
use crate::error::{Error, Result};

pub const KEYS: [&str; 14] = [
    "root",
    "include",
    "exclude",
    "defects",
    "methods",
    "name",
    "out",
    "seed",
    "cluster_threshold",
    "redundancy_threshold",
    "k",
    "repetitions",
    "stratified",
    "log1p",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub root: Option<PathBuf>,
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub defects: Option<PathBuf>,
    /// Method CSV; `-` reads standard input.
    pub methods: Option<PathBuf>,
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub filter: FilterConfig,
    pub k: usize,
    pub repetitions: usize,
    pub stratified: bool,
    pub log1p: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plan = CvPlan::new(0);
        RunConfig {
            root: None,
            include: DEFAULT_INCLUDE.map(String::from).to_vec(),
            exclude: Vec::new(),
            defects: None,
            methods: None,
            name: None,
            out: None,
            seed: None,
            filter: FilterConfig::default(),
            k: plan.k,
            repetitions: plan.repetitions,
            stratified: plan.stratified,
            log1p: false,
        }
    }
}

/// Parse `key = value` lines; `#` starts a comment line.
pub fn parse_config(source: &str, text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Usage(format!("{source}:{}: {msg}", i + 1));
        let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(bad(format!("unknown key {k:?}")));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(bad(format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Usage(format!("bad value for {key}: {v:?}")))
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

impl RunConfig {
    /// Apply parsed file settings; relative paths resolve against `base`.
    pub fn apply_file(&mut self, map: &BTreeMap<String, String>, base: &Path) -> Result<()> {
        let path = |v: &str| if v == "-" { PathBuf::from(v) } else { base.join(v) };
        for (k, v) in map {
            match k.as_str() {
                "root" => self.root = Some(path(v)),
                "include" => self.include = list(v),
                "exclude" => self.exclude = list(v),
                "defects" => self.defects = Some(path(v)),
                "methods" => self.methods = Some(path(v)),
                "name" => self.name = Some(v.clone()),
                "out" => self.out = Some(path(v)),
                "seed" => self.seed = Some(value(k, v)?),
                "cluster_threshold" => self.filter.cluster_threshold = value(k, v)?,
                "redundancy_threshold" => self.filter.redundancy_cutoff = value(k, v)?,
                "k" => self.k = value(k, v)?,
                "repetitions" => self.repetitions = value(k, v)?,
                "stratified" => self.stratified = value(k, v)?,
                "log1p" => self.log1p = value(k, v)?,
                _ => unreachable!("keys checked while parsing"),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate().map_err(|e| Error::Usage(e.to_string()))?;
        if self.k < 2 {
            return Err(Error::Usage(format!("k must be at least 2, got {}", self.k)));
        }
        if self.repetitions < 1 {
            return Err(Error::Usage("repetitions must be at least 1".into()));
        }
        if self.include.is_empty() {
            return Err(Error::Usage("include needs at least one glob".into()));
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Usage("an explicit --seed is required".into()))
    }

    pub fn plan(&self, seed: u64) -> CvPlan {
        CvPlan { k: self.k, repetitions: self.repetitions, seed, stratified: self.stratified }
    }

    pub fn study(&self, seed: u64) -> StudyConfig {
        StudyConfig { plan: self.plan(seed), filter: self.filter, log1p: self.log1p }
    }
}
