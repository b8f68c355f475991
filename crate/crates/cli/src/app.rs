//! Command-line surface.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use methagg_core::filtering::{one_level_filter, two_level_filter};
use methagg_core::matrix::MetricMatrix;
use methagg_core::metrics::{Metric, MethodMetrics};
use methagg_core::stats::ModelKind;
use methagg_core::study::{
    correlation_increase, redundancy_measures, rq1_table, rq2_table, run_rq3, synth_corpus, Dataset, DefectRate,
    RqTable, SynthParams,
};

use crate::config::{parse_config, RunConfig};
use crate::corpus::{extract_files, scan_corpus};
use crate::csvio::{read_files, read_methods, write_files, write_methods};
use crate::defects::{bug_map, read_defects};
use crate::error::{Error, Result};
use crate::report::{sha256_hex, write_atomic, write_bundle, Digest256, Manifest, Skipped};

#[derive(Debug, Parser)]
#[command(name = "methagg", version, about = "Method-level code metrics, file-level aggregation and defect-model studies")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Settings file of `key = value` lines; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corpus root to scan for source files.
    #[arg(long, global = true, value_name = "DIR")]
    root: Option<PathBuf>,
    /// Glob of files to include, relative to the root (repeatable).
    #[arg(long, global = true, value_name = "GLOB")]
    include: Vec<String>,
    /// Glob of files to exclude, relative to the root (repeatable).
    #[arg(long, global = true, value_name = "GLOB")]
    exclude: Vec<String>,
    /// Defect CSV with header `file,bugs`.
    #[arg(long, global = true, value_name = "FILE")]
    defects: Option<PathBuf>,
    /// Method CSV to read instead of scanning a root; `-` for standard input.
    #[arg(long, global = true, value_name = "FILE")]
    methods: Option<PathBuf>,
    /// Dataset name used in reports.
    #[arg(long, global = true)]
    name: Option<String>,
    /// Output file, or the bundle directory for `study`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "RHO")]
    cluster_threshold: Option<f64>,
    #[arg(long, global = true, value_name = "R2")]
    redundancy_threshold: Option<f64>,
    /// Cross-validation folds.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Cross-validation repetitions.
    #[arg(long, global = true)]
    repetitions: Option<usize>,
    /// Plain instead of class-stratified folds for logistic models.
    #[arg(long, global = true)]
    no_stratify: bool,
    /// Model log(1 + bugs) in the linear models.
    #[arg(long, global = true)]
    log1p: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-method metrics as CSV.
    Extract,
    /// Per-file aggregated metrics as CSV.
    Aggregate,
    /// Correlation and redundancy filtering report as JSON.
    Filter {
        /// File-level CSV to filter instead of method metrics.
        #[arg(long, value_name = "FILE")]
        files: Option<PathBuf>,
        /// Filter methods, aggregate per file, filter again.
        #[arg(long, conflicts_with = "files")]
        two_level: bool,
    },
    /// Run analyses and write a report bundle.
    Study {
        #[arg(value_enum)]
        which: Which,
    },
    /// Generate a seeded synthetic method CSV with a bugs column.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Rq1,
    Rq2,
    Rq3,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Link {
    Softplus,
    Proportional,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    files: usize,
    #[arg(long, default_value_t = 8.0)]
    mean_methods: f64,
    #[arg(long, default_value_t = 10.0)]
    loc_median: f64,
    #[arg(long, default_value_t = 0.9)]
    loc_sigma: f64,
    #[arg(long, default_value_t = 0.15)]
    vg_slope: f64,
    #[arg(long, default_value_t = 2.0)]
    vg_noise: f64,
    /// Defect rate as a function of file LOC.
    #[arg(long, value_enum, default_value_t = Link::Softplus)]
    link: Link,
    #[arg(long, default_value_t = -1.5, allow_negative_numbers = true)]
    intercept: f64,
    #[arg(long, default_value_t = 0.01)]
    slope: f64,
    #[arg(long, default_value_t = 0.01)]
    per_loc: f64,
}

/// Standard streams of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Run with the given arguments (program name first) and return the exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { io.stdout.write_all(text.as_bytes()) } else { io.stderr.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli, io) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(opts: &Opts) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
        let map = parse_config(&path.display().to_string(), &text)?;
        cfg.apply_file(&map, path.parent().unwrap_or(Path::new("")))?;
    }
    if opts.root.is_some() {
        cfg.root.clone_from(&opts.root);
    }
    if !opts.include.is_empty() {
        cfg.include.clone_from(&opts.include);
    }
    if !opts.exclude.is_empty() {
        cfg.exclude.clone_from(&opts.exclude);
    }
    for (slot, flag) in [(&mut cfg.defects, &opts.defects), (&mut cfg.methods, &opts.methods), (&mut cfg.out, &opts.out)] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    if opts.name.is_some() {
        cfg.name.clone_from(&opts.name);
    }
    cfg.seed = opts.seed.or(cfg.seed);
    cfg.filter.cluster_threshold = opts.cluster_threshold.unwrap_or(cfg.filter.cluster_threshold);
    cfg.filter.redundancy_cutoff = opts.redundancy_threshold.unwrap_or(cfg.filter.redundancy_cutoff);
    cfg.k = opts.k.unwrap_or(cfg.k);
    cfg.repetitions = opts.repetitions.unwrap_or(cfg.repetitions);
    cfg.stratified &= !opts.no_stratify;
    cfg.log1p |= opts.log1p;
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli, io: &mut Io<'_>) -> Result<()> {
    let cfg = resolve(&cli.opts)?;
    match cli.command {
        Command::Extract => {
            let root = cfg.root.as_deref().ok_or_else(|| Error::Usage("extract needs --root".into()))?;
            let ex = extract_files(&scan_corpus(root, &cfg.include, &cfg.exclude)?)?;
            for (path, reason) in &ex.skipped {
                let _ = writeln!(io.stderr, "warning: skipped {path}: {reason}");
            }
            emit(cfg.out.as_deref(), write_methods(&ex.methods, None).as_bytes(), io)
        }
        Command::Aggregate => {
            let loaded = load_methods(&cfg, io)?;
            let files = MetricMatrix::file_level(&loaded.methods).map_err(|e| Error::Run(e.to_string()))?;
            emit(cfg.out.as_deref(), write_files(&files).as_bytes(), io)
        }
        Command::Filter { files, two_level } => {
            let json = if let Some(path) = files {
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let m = read_files(&path.display().to_string(), &bytes)?;
                to_json(&one_level_filter(&m, &cfg.filter)?)?
            } else {
                let loaded = load_methods(&cfg, io)?;
                let m = MetricMatrix::from_methods(&loaded.methods);
                if two_level {
                    let groups: Vec<String> = loaded.methods.iter().map(|m| m.file.clone()).collect();
                    to_json(&two_level_filter(&m, &groups, &cfg.filter)?.0)?
                } else {
                    to_json(&one_level_filter(&m, &cfg.filter)?)?
                }
            };
            emit(cfg.out.as_deref(), json.as_bytes(), io)
        }
        Command::Study { which } => study(&cfg, which, io),
        Command::Synth(a) => {
            let seed = cfg.require_seed()?;
            let defects = match a.link {
                Link::Softplus => DefectRate::Softplus { intercept: a.intercept, slope: a.slope },
                Link::Proportional => DefectRate::Proportional { per_loc: a.per_loc },
            };
            let params = SynthParams {
                files: a.files,
                mean_methods: a.mean_methods,
                loc_median: a.loc_median,
                loc_sigma: a.loc_sigma,
                vg_slope: a.vg_slope,
                vg_noise: a.vg_noise,
                defects,
            };
            let corpus = synth_corpus(&params, seed).map_err(|e| Error::Usage(e.to_string()))?;
            emit(cfg.out.as_deref(), write_methods(&corpus.methods, Some(&corpus.bugs)).as_bytes(), io)
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Run(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, bytes: &[u8], io: &mut Io<'_>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => io.stdout.write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

struct Loaded {
    methods: Vec<MethodMetrics>,
    bugs: Option<BTreeMap<String, u64>>,
    inputs: Vec<Digest256>,
    skipped: Vec<Skipped>,
}

/// Methods from `--methods`, else from scanning `--root`, else a method CSV
/// on standard input.
fn load_methods(cfg: &RunConfig, io: &mut Io<'_>) -> Result<Loaded> {
    let read_csv = |label: String, bytes: Vec<u8>| -> Result<Loaded> {
        let t = read_methods(&label, &bytes)?;
        Ok(Loaded { methods: t.methods, bugs: t.bugs, inputs: vec![Digest256 { path: label, sha256: sha256_hex(&bytes) }], skipped: Vec::new() })
    };
    match (&cfg.methods, &cfg.root) {
        (Some(p), _) if p.as_os_str() != "-" => {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            read_csv(p.display().to_string(), bytes)
        }
        (None, Some(root)) => {
            let ex = extract_files(&scan_corpus(root, &cfg.include, &cfg.exclude)?)?;
            let skipped: Vec<Skipped> = ex.skipped.into_iter().map(|(path, reason)| Skipped { path, reason }).collect();
            for s in &skipped {
                let _ = writeln!(io.stderr, "warning: skipped {}: {}", s.path, s.reason);
            }
            let inputs = ex.digests.into_iter().map(|(path, sha256)| Digest256 { path, sha256 }).collect();
            Ok(Loaded { methods: ex.methods, bugs: None, inputs, skipped })
        }
        _ => {
            let mut bytes = Vec::new();
            io.stdin.read_to_end(&mut bytes).map_err(|e| Error::io("<stdin>", e))?;
            read_csv("-".to_string(), bytes)
        }
    }
}

fn study(cfg: &RunConfig, which: Which, io: &mut Io<'_>) -> Result<()> {
    let seed = match which {
        Which::Rq3 | Which::All => Some(cfg.require_seed()?),
        Which::Rq1 | Which::Rq2 => cfg.seed,
    };
    let command = format!("study {}", which.to_possible_value().expect("no skipped variants").get_name());
    let mut manifest = Manifest::new(&command, seed, &cfg.filter, cfg.plan(seed.unwrap_or(0)), cfg.log1p);
    let loaded = load_methods(cfg, io)?;
    manifest.inputs = loaded.inputs;
    manifest.skipped_files = loaded.skipped;
    let bugs = match (&cfg.defects, loaded.bugs) {
        (Some(p), _) => {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            let label = p.display().to_string();
            let records = read_defects(&label, &bytes)?;
            manifest.inputs.push(Digest256 { path: label, sha256: sha256_hex(&bytes) });
            bug_map(&records)
        }
        (None, Some(b)) => b,
        (None, None) => return Err(Error::Usage("no defect labels: pass --defects or a method CSV with a bugs column".into())),
    };
    let name = cfg.name.clone().unwrap_or_else(|| "corpus".to_string());
    if loaded.methods.is_empty() || bugs.is_empty() {
        return Err(Error::Run("need at least one method and one defect record".into()));
    }
    let (d, stats) = Dataset::join(&name, &loaded.methods, &bugs)?;
    if !stats.unlabeled_files.is_empty() || !stats.unmatched_records.is_empty() {
        let w = format!(
            "join: {} of {} files matched; {} files without a defect record excluded; {} defect records without methods ignored",
            stats.matched,
            stats.files_with_methods,
            stats.unlabeled_files.len(),
            stats.unmatched_records.len()
        );
        let _ = writeln!(io.stderr, "warning: {w}");
        manifest.warnings.push(w);
    }
    manifest.dataset = name.clone();
    manifest.join = Some(stats);

    let tables = study_tables(&d, cfg, which, seed, &mut manifest);
    for g in &manifest.gaps {
        let _ = writeln!(io.stderr, "warning: gap: {g}");
    }
    match &cfg.out {
        Some(dir) => {
            let files: Vec<(String, String)> = tables.iter().map(|(n, t)| (n.clone(), t.to_csv())).collect();
            write_bundle(dir, &files, manifest)?;
        }
        None => {
            for (i, (_, t)) in tables.iter().enumerate() {
                let sep = if i == 0 { "" } else { "\n" };
                write!(io.stdout, "{sep}{}", t.to_text()).map_err(|e| Error::io("<stdout>", e))?;
            }
        }
    }
    Ok(())
}

fn study_tables(d: &Dataset, cfg: &RunConfig, which: Which, seed: Option<u64>, manifest: &mut Manifest) -> Vec<(String, RqTable)> {
    let mut tables = Vec::new();
    if matches!(which, Which::Rq1 | Which::All) {
        match correlation_increase(d) {
            Ok(r) => tables.push(("rq1.csv".to_string(), rq1_table(&d.name, &r))),
            Err(e) => manifest.gaps.push(format!("rq1: {e}")),
        }
    }
    if matches!(which, Which::Rq2 | Which::All) {
        for m in Metric::ALL {
            let rows = match redundancy_measures(d, m, &cfg.filter) {
                Ok(v) => vec![(d.name.clone(), v)],
                Err(e) => {
                    manifest.gaps.push(format!("rq2 {m}: {e}"));
                    Vec::new()
                }
            };
            tables.push((format!("rq2_{}.csv", m.name()), rq2_table(m, &rows)));
        }
    }
    if let (Which::Rq3 | Which::All, Some(seed)) = (which, seed) {
        match run_rq3(d, &cfg.study(seed)) {
            Ok(r) => {
                manifest.gaps.extend(r.gaps.iter().map(|g| format!("rq3 {g}")));
                for o in &r.outcomes {
                    if o.nonconverged > 0 || !o.skipped.is_empty() {
                        manifest.warnings.push(format!(
                            "rq3 {} {} {}: {} folds skipped, {} fits hit the iteration cap",
                            o.filtering,
                            o.label,
                            o.kind.name(),
                            o.skipped.len(),
                            o.nonconverged
                        ));
                    }
                }
                tables.push(("rq3_mse.csv".to_string(), r.means_table(ModelKind::Linear)));
                tables.push(("rq3_auc.csv".to_string(), r.means_table(ModelKind::Logistic)));
                tables.push(("rq3_stats.csv".to_string(), r.stats_table()));
                tables.push(("retained_counts.csv".to_string(), r.retained_table()));
            }
            Err(e) => manifest.gaps.push(format!("rq3: {e}")),
        }
    }
    tables
}
