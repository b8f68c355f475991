//! Cross-validated defect models per aggregation technique, plus the model
//! using every aggregation, under one- and two-level filtering.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::cv::{repeated_cv, CvInput, EvalOutcome};
use super::table::{Cell, RqTable};
use super::{Dataset, StudyConfig};
use crate::aggregate::{column_name, Technique};
use crate::error::StudyError;
use crate::filtering::one_level_filter;
use crate::metrics::Metric;
use crate::stats::{cliffs_delta, mann_whitney_u, Magnitude, ModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Filtering {
    /// Filter the aggregated columns directly.
    F1,
    /// Filter method metrics, aggregate the survivors, filter again.
    F2,
}

impl Filtering {
    pub const ALL: [Filtering; 2] = [Filtering::F1, Filtering::F2];

    pub fn name(self) -> &'static str {
        match self {
            Filtering::F1 => "F1",
            Filtering::F2 => "F2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelLabel {
    All,
    Only(Technique),
}

impl ModelLabel {
    pub fn all() -> [ModelLabel; 10] {
        let mut out = [ModelLabel::All; 10];
        for (slot, t) in out[1..].iter_mut().zip(Technique::ALL) {
            *slot = ModelLabel::Only(t);
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelLabel::All => "All",
            ModelLabel::Only(t) => t.label(),
        }
    }

    fn column(self) -> &'static str {
        match self {
            ModelLabel::All => "all",
            ModelLabel::Only(t) => t.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Retained {
    pub filtering: Filtering,
    pub label: ModelLabel,
    pub candidates: usize,
    pub predictors: Vec<String>,
}

/// All-versus-Sum comparison of fold values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub filtering: Filtering,
    pub kind: ModelKind,
    pub p: f64,
    pub cliffs_d: f64,
    pub magnitude: Magnitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rq3Result {
    pub dataset: String,
    pub outcomes: Vec<EvalOutcome>,
    pub retained: Vec<Retained>,
    pub comparisons: Vec<Comparison>,
    /// Configurations that produced no result, with the reason.
    pub gaps: Vec<String>,
}

impl Rq3Result {
    pub fn outcome(&self, filtering: Filtering, label: ModelLabel, kind: ModelKind) -> Option<&EvalOutcome> {
        self.outcomes
            .iter()
            .find(|o| o.filtering == filtering.name() && o.label == label.name() && o.kind == kind)
    }

    pub fn mean(&self, filtering: Filtering, label: ModelLabel, kind: ModelKind) -> Option<f64> {
        self.outcome(filtering, label, kind).and_then(EvalOutcome::mean)
    }

    pub fn comparison(&self, filtering: Filtering, kind: ModelKind) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.filtering == filtering && c.kind == kind)
    }

    /// Table of mean fold values for one model kind: a row per filtering
    /// approach, a column per model.
    pub fn means_table(&self, kind: ModelKind) -> RqTable {
        let mut header = vec!["dataset".to_string(), "filtering".to_string()];
        header.extend(ModelLabel::all().iter().map(|l| l.column().to_string()));
        let what = if kind == ModelKind::Linear { "MSE of the linear" } else { "AUC of the logistic" };
        let mut t = RqTable::new(format!("Mean {what} models over all folds"), header);
        for f in Filtering::ALL {
            let mut row = vec![Cell::text(self.dataset.clone()), Cell::text(f.name())];
            row.extend(ModelLabel::all().iter().map(|&l| Cell::Num(self.mean(f, l, kind))));
            t.push(row);
        }
        t
    }

    /// Mann-Whitney p and Cliff's |d| between the All and Sum fold values.
    pub fn stats_table(&self) -> RqTable {
        let mut header = vec!["dataset".to_string(), "filtering".to_string()];
        for k in [ModelKind::Linear, ModelKind::Logistic] {
            for col in ["p", "abs_d", "magnitude"] {
                header.push(format!("{}_{col}", k.name()));
            }
        }
        let mut t = RqTable::new("All versus Sum: Mann-Whitney U and Cliff's |d|", header);
        for f in Filtering::ALL {
            let mut row = vec![Cell::text(self.dataset.clone()), Cell::text(f.name())];
            for k in [ModelKind::Linear, ModelKind::Logistic] {
                match self.comparison(f, k) {
                    Some(c) => row.extend([
                        Cell::Num(Some(c.p)),
                        Cell::Num(Some(libm::fabs(c.cliffs_d))),
                        Cell::text(c.magnitude.name()),
                    ]),
                    None => row.extend([Cell::Num(None), Cell::Num(None), Cell::text("")]),
                }
            }
            t.push(row);
        }
        t
    }

    /// Number of predictors kept by each filtering approach.
    pub fn retained_table(&self) -> RqTable {
        let header = ["dataset", "model", "f1_candidates", "f1_retained", "f2_candidates", "f2_retained"]
            .map(String::from)
            .to_vec();
        let mut t = RqTable::new("Variables retained by each filtering approach", header);
        for l in ModelLabel::all() {
            let mut row = vec![Cell::text(self.dataset.clone()), Cell::text(l.name())];
            for f in Filtering::ALL {
                match self.retained.iter().find(|r| r.filtering == f && r.label == l) {
                    Some(r) => row.extend([Cell::Num(Some(r.candidates as f64)), Cell::Num(Some(r.predictors.len() as f64))]),
                    None => row.extend([Cell::Num(None), Cell::Num(None)]),
                }
            }
            t.push(row);
        }
        t
    }
}

/// Candidate columns for a model label, given the metrics in play.
fn candidates(metrics: &[Metric], label: ModelLabel) -> Vec<String> {
    match label {
        ModelLabel::All => metrics
            .iter()
            .flat_map(|m| Technique::ALL.map(|t| column_name(m.name(), t)))
            .collect(),
        ModelLabel::Only(t) => metrics.iter().map(|m| column_name(m.name(), t)).collect(),
    }
}

/// Filter predictors for every (filtering, label) pair, cross-validate linear
/// and logistic models on them, and compare All with Sum.
pub fn run_rq3(d: &Dataset, cfg: &StudyConfig) -> Result<Rq3Result, StudyError> {
    cfg.filter.validate()?;
    cfg.plan.validate(d.n_files())?;
    let counts: Vec<f64> = if cfg.log1p { d.bugs.iter().map(|&b| libm::log1p(b)).collect() } else { d.bugs.clone() };
    let level1 = one_level_filter(&d.methods, &cfg.filter)?;
    let level1_metrics: Vec<Metric> = level1.retained.iter().filter_map(|n| n.parse().ok()).collect();
    let mut result = Rq3Result {
        dataset: d.name.clone(),
        outcomes: Vec::new(),
        retained: Vec::new(),
        comparisons: Vec::new(),
        gaps: Vec::new(),
    };
    for f in Filtering::ALL {
        let metrics: &[Metric] = match f {
            Filtering::F1 => &Metric::ALL,
            Filtering::F2 => &level1_metrics,
        };
        for label in ModelLabel::all() {
            let cand = candidates(metrics, label);
            let predictors = match d.files.select(&cand).map_err(StudyError::Stats).and_then(|m| Ok(one_level_filter(&m, &cfg.filter)?)) {
                Ok(r) => r.retained,
                Err(e) => {
                    result.gaps.push(format!("{} {}: filtering failed: {e}", f.name(), label.name()));
                    continue;
                }
            };
            for kind in [ModelKind::Linear, ModelKind::Logistic] {
                let key = format!("{}/{}", d.name, kind.name());
                let input = CvInput { matrix: &d.files, predictors: &predictors, counts: &counts, labels: &d.defective, key: &key };
                match repeated_cv(input, kind, &cfg.plan) {
                    Ok(mut o) => {
                        o.label = label.name().to_string();
                        o.filtering = f.name().to_string();
                        result.outcomes.push(o);
                    }
                    Err(e) => result.gaps.push(format!("{} {} {}: {e}", f.name(), label.name(), kind.name())),
                }
            }
            result.retained.push(Retained { filtering: f, label, candidates: cand.len(), predictors });
        }
        for kind in [ModelKind::Linear, ModelKind::Logistic] {
            let all = result.outcome(f, ModelLabel::All, kind).map(EvalOutcome::fold_values);
            let sum = result.outcome(f, ModelLabel::Only(Technique::Sum), kind).map(EvalOutcome::fold_values);
            if let (Some(a), Some(s)) = (all, sum) {
                if let (Ok(mw), Ok(es)) = (mann_whitney_u(&a, &s), cliffs_delta(&a, &s)) {
                    result.comparisons.push(Comparison { filtering: f, kind, p: mw.p, cliffs_d: es.cliffs_d, magnitude: es.magnitude });
                }
            }
        }
    }
    Ok(result)
}
