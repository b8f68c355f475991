//! The three analyses (correlation with size after aggregation, redundancy
//! of aggregations, cross-validated defect models) and a synthetic corpus
//! generator.

mod cv;
mod rq1;
mod rq2;
mod rq3;
mod synth;
mod table;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use cv::{assign_folds, derive_seed, fnv1a, repeated_cv, CvInput, CvPlan, EvalOutcome, FoldValue, SkippedFold};
pub use rq1::{correlation_increase, rq1_table, Rq1Cell, Rq1Result};
pub use rq2::{redundancy_measures, rq2_table};
pub use rq3::{run_rq3, Comparison, Filtering, ModelLabel, Rq3Result};
pub use synth::{file_name, synth_corpus, DefectRate, SynthCorpus, SynthParams};
pub use table::{fmt_sig, Cell, RqTable};

use crate::error::StudyError;
use crate::filtering::FilterConfig;
use crate::matrix::MetricMatrix;
use crate::metrics::MethodMetrics;

/// Method metrics and file-level aggregates of one corpus, joined with
/// per-file defect counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// Twelve metric columns, one row per method.
    pub methods: MetricMatrix,
    /// File of each method row.
    pub method_files: Vec<String>,
    /// 108 aggregated columns, one row per file, files in ascending order.
    pub files: MetricMatrix,
    pub bugs: Vec<f64>,
    pub defective: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JoinStats {
    pub files_with_methods: usize,
    pub defect_records: usize,
    pub matched: usize,
    /// Files with methods but no defect record; excluded.
    pub unlabeled_files: Vec<String>,
    /// Defect records naming no file with methods; ignored.
    pub unmatched_records: Vec<String>,
}

impl Dataset {
    /// Inner join of methods (by their `file`) with defect counts.
    pub fn join(
        name: &str,
        methods: &[MethodMetrics],
        bugs: &BTreeMap<String, u64>,
    ) -> Result<(Dataset, JoinStats), StudyError> {
        let mut files: BTreeMap<&str, ()> = BTreeMap::new();
        for m in methods {
            files.insert(&m.file, ());
        }
        let stats = JoinStats {
            files_with_methods: files.len(),
            defect_records: bugs.len(),
            matched: files.keys().filter(|f| bugs.contains_key(**f)).count(),
            unlabeled_files: files.keys().filter(|f| !bugs.contains_key(**f)).map(|f| String::from(*f)).collect(),
            unmatched_records: bugs.keys().filter(|f| !files.contains_key(f.as_str())).cloned().collect(),
        };
        if stats.matched == 0 {
            return Err(StudyError::TooSmall(String::from("no file has both methods and a defect record")));
        }
        let kept: Vec<MethodMetrics> = methods.iter().filter(|m| bugs.contains_key(&m.file)).cloned().collect();
        let file_matrix = MetricMatrix::file_level(&kept)?;
        let counts: Vec<f64> = file_matrix.row_ids().iter().map(|f| bugs[f] as f64).collect();
        let dataset = Dataset {
            name: String::from(name),
            methods: MetricMatrix::from_methods(&kept),
            method_files: kept.iter().map(|m| m.file.clone()).collect(),
            files: file_matrix,
            defective: counts.iter().map(|&c| c > 0.0).collect(),
            bugs: counts,
        };
        Ok((dataset, stats))
    }

    pub fn n_files(&self) -> usize {
        self.files.n_rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyConfig {
    pub plan: CvPlan,
    pub filter: FilterConfig,
    /// Model log(1 + bugs) instead of raw counts in the linear models.
    pub log1p: bool,
}

impl StudyConfig {
    pub fn new(seed: u64) -> Self {
        StudyConfig { plan: CvPlan::new(seed), filter: FilterConfig::default(), log1p: false }
    }
}
