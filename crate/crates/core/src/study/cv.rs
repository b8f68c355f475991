//! Repeated k-fold cross-validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::StudyError;
use crate::matrix::MetricMatrix;
use crate::stats::{auc, fit_linear, fit_logistic, mse, DesignMatrix, ModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvPlan {
    pub k: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Keep the class ratio in every fold (logistic models only).
    pub stratified: bool,
}

impl CvPlan {
    pub fn new(seed: u64) -> Self {
        CvPlan { k: 10, repetitions: 10, seed, stratified: true }
    }

    pub fn validate(&self, n: usize) -> Result<(), StudyError> {
        if self.k < 2 || self.repetitions < 1 {
            return Err(StudyError::Argument(format!("need k >= 2 and repetitions >= 1, got k={} repetitions={}", self.k, self.repetitions)));
        }
        if n < self.k {
            return Err(StudyError::TooSmall(format!("{n} rows for {} folds", self.k)));
        }
        Ok(())
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for one repetition of one configuration; independent of the order in
/// which configurations run.
pub fn derive_seed(master: u64, key: &str, repetition: usize) -> u64 {
    let mut bytes = Vec::with_capacity(key.len() + 16);
    bytes.extend_from_slice(&master.to_le_bytes());
    bytes.extend_from_slice(key.as_bytes());
    bytes.extend_from_slice(&(repetition as u64).to_le_bytes());
    fnv1a(&bytes)
}

/// Fold index of every row for one repetition. Rows are shuffled and dealt
/// round-robin, so fold sizes differ by at most one; with `strata`, the two
/// classes are shuffled separately and dealt one after the other, which also
/// spreads each class evenly.
pub fn assign_folds(n: usize, k: usize, strata: Option<&[bool]>, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<usize> = match strata {
        Some(labels) => {
            let mut pos: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
            let mut neg: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
            pos.shuffle(&mut rng);
            neg.shuffle(&mut rng);
            pos.extend(neg);
            pos
        }
        None => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            all
        }
    };
    let mut fold = alloc::vec![0; n];
    for (i, &row) in order.iter().enumerate() {
        fold[row] = i % k;
    }
    fold
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldValue {
    pub repetition: usize,
    pub fold: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkippedFold {
    pub repetition: usize,
    pub fold: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalOutcome {
    pub label: String,
    pub filtering: String,
    pub kind: ModelKind,
    pub predictors: Vec<String>,
    /// MSE (linear) or AUC (logistic) per evaluated fold.
    pub values: Vec<FoldValue>,
    pub skipped: Vec<SkippedFold>,
    /// Folds whose logistic fit hit the iteration cap.
    pub nonconverged: usize,
}

impl EvalOutcome {
    pub fn fold_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value).collect()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.values.is_empty() {
            None
        } else {
            Some(self.values.iter().map(|v| v.value).sum::<f64>() / self.values.len() as f64)
        }
    }
}

/// Data for one cross-validated configuration.
#[derive(Debug, Clone, Copy)]
pub struct CvInput<'a> {
    pub matrix: &'a MetricMatrix,
    pub predictors: &'a [String],
    /// Response for linear models.
    pub counts: &'a [f64],
    /// Response for logistic models.
    pub labels: &'a [bool],
    /// Key from which fold seeds are derived.
    pub key: &'a str,
}

/// Train on k − 1 folds and score the held-out fold, `repetitions` times.
/// Linear models are scored by MSE against `counts`, logistic models by AUC
/// against `labels`. Folds that cannot be fitted or scored are recorded as
/// skipped.
pub fn repeated_cv(input: CvInput<'_>, kind: ModelKind, plan: &CvPlan) -> Result<EvalOutcome, StudyError> {
    let n = input.matrix.n_rows();
    plan.validate(n)?;
    if input.counts.len() != n || input.labels.len() != n {
        return Err(StudyError::Argument(format!("{n} rows but {} counts and {} labels", input.counts.len(), input.labels.len())));
    }
    let response: Vec<f64> = match kind {
        ModelKind::Linear => input.counts.to_vec(),
        ModelKind::Logistic => input.labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(),
    };
    let full = DesignMatrix::from_matrix(input.matrix, input.predictors, &response).map_err(StudyError::Stats)?;
    let cols = full.columns();
    let mut out = EvalOutcome {
        label: String::new(),
        filtering: String::new(),
        kind,
        predictors: input.predictors.to_vec(),
        values: Vec::new(),
        skipped: Vec::new(),
        nonconverged: 0,
    };
    let strata = (kind == ModelKind::Logistic && plan.stratified).then_some(input.labels);
    for rep in 0..plan.repetitions {
        let folds = assign_folds(n, plan.k, strata, derive_seed(plan.seed, input.key, rep));
        for f in 0..plan.k {
            let subset = |test: bool| -> (Vec<Vec<f64>>, Vec<f64>) {
                let rows: Vec<usize> = (0..n).filter(|&i| (folds[i] == f) == test).collect();
                let c = cols.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect();
                (c, rows.iter().map(|&i| response[i]).collect())
            };
            let (train_x, train_y) = subset(false);
            let (test_x, test_y) = subset(true);
            let skip = |out: &mut EvalOutcome, reason: String| out.skipped.push(SkippedFold { repetition: rep, fold: f, reason });
            let train = DesignMatrix::new(input.predictors.to_vec(), train_x, train_y).map_err(StudyError::Stats)?;
            let fitted = match kind {
                ModelKind::Linear => fit_linear(&train),
                ModelKind::Logistic => fit_logistic(&train),
            };
            let model = match fitted {
                Ok(m) => m,
                Err(e) => {
                    skip(&mut out, format!("fit: {e}"));
                    continue;
                }
            };
            if !model.converged {
                out.nonconverged += 1;
            }
            let preds: Vec<f64> = (0..test_y.len())
                .map(|i| model.predict(&test_x.iter().map(|c| c[i]).collect::<Vec<f64>>()))
                .collect();
            let score = match kind {
                ModelKind::Linear => mse(&preds, &test_y),
                ModelKind::Logistic => {
                    let labels: Vec<bool> = test_y.iter().map(|&y| y == 1.0).collect();
                    auc(&preds, &labels)
                }
            };
            match score {
                Ok(value) => out.values.push(FoldValue { repetition: rep, fold: f, value }),
                Err(e) => skip(&mut out, format!("score: {e}")),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use rand::Rng;

    #[test]
    fn folds_partition_rows_evenly() {
        for n in [10, 23, 57] {
            for strata in [None, Some((0..n).map(|i| i % 3 == 0).collect::<Vec<bool>>())] {
                let folds = assign_folds(n, 10, strata.as_deref(), 42);
                let mut sizes = [0usize; 10];
                for &f in &folds {
                    sizes[f] += 1;
                }
                let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
                assert!(hi - lo <= 1, "{sizes:?}");
                assert_eq!(sizes.iter().sum::<usize>(), n);
            }
        }
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels: Vec<bool> = (0..100).map(|i| i < 30).collect();
        let folds = assign_folds(100, 10, Some(&labels), 7);
        for f in 0..10 {
            let pos = (0..100).filter(|&i| folds[i] == f && labels[i]).count();
            assert_eq!(pos, 3);
        }
    }

    #[test]
    fn seeds_depend_on_key_and_repetition() {
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
        assert_ne!(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    fn fixture(n: usize) -> (MetricMatrix, Vec<f64>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = a.iter().zip(&b).map(|(x, z)| 3.0 * x - 2.0 * z + 1.0).collect();
        let labels = (0..n).map(|_| rng.random::<bool>()).collect();
        let m = MetricMatrix::from_columns(vec![("a".into(), a), ("b".into(), b)]).unwrap();
        (m, y, labels)
    }

    #[test]
    fn exact_linear_recovery_and_determinism() {
        let (m, y, labels) = fixture(60);
        let preds = vec!["a".to_string(), "b".to_string()];
        let input = CvInput { matrix: &m, predictors: &preds, counts: &y, labels: &labels, key: "t" };
        let plan = CvPlan::new(9);
        let out = repeated_cv(input, ModelKind::Linear, &plan).unwrap();
        assert_eq!(out.values.len(), 100);
        assert!(out.values.iter().all(|v| v.value < 1e-10));
        assert_eq!(out, repeated_cv(input, ModelKind::Linear, &plan).unwrap());
        let mean = out.fold_values().iter().sum::<f64>() / 100.0;
        assert_eq!(out.mean(), Some(mean));
    }

    #[test]
    fn single_class_folds_are_skipped() {
        let (m, y, _) = fixture(40);
        let labels: Vec<bool> = (0..40).map(|i| i < 3).collect();
        let preds = vec!["a".to_string()];
        let input = CvInput { matrix: &m, predictors: &preds, counts: &y, labels: &labels, key: "t" };
        let plan = CvPlan { stratified: false, ..CvPlan::new(1) };
        let out = repeated_cv(input, ModelKind::Logistic, &plan).unwrap();
        assert!(!out.skipped.is_empty());
        assert_eq!(out.values.len() + out.skipped.len(), 100);
    }

    #[test]
    fn plan_validation() {
        let (m, y, labels) = fixture(5);
        let preds = vec![];
        let input = CvInput { matrix: &m, predictors: &preds, counts: &y, labels: &labels, key: "t" };
        assert!(matches!(repeated_cv(input, ModelKind::Linear, &CvPlan::new(1)), Err(StudyError::TooSmall(_))));
        let plan = CvPlan { k: 1, ..CvPlan::new(1) };
        assert!(matches!(repeated_cv(input, ModelKind::Linear, &plan), Err(StudyError::Argument(_))));
    }
}
