use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::least_squares;
use crate::error::StatsError;
use crate::matrix::MetricMatrix;

/// Predictor columns plus a response.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, cols: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self, StatsError> {
        if names.len() != cols.len() {
            return Err(StatsError::LengthMismatch(names.len(), cols.len()));
        }
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(StatsError::DuplicateColumn(name.clone()));
            }
        }
        for c in &cols {
            if c.len() != y.len() {
                return Err(StatsError::LengthMismatch(y.len(), c.len()));
            }
        }
        if cols.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(DesignMatrix { names, cols, y })
    }

    /// Columns `predictors` of `m` with response `y`.
    pub fn from_matrix(m: &MetricMatrix, predictors: &[String], y: &[f64]) -> Result<Self, StatsError> {
        let cols = predictors
            .iter()
            .map(|p| m.column_by_name(p).ok_or_else(|| StatsError::MissingPredictor(p.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        DesignMatrix::new(predictors.to_vec(), cols, y.to_vec())
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|c| c[i]).collect()
    }

    fn with_intercept(&self) -> Vec<Vec<f64>> {
        let mut cols = Vec::with_capacity(self.cols.len() + 1);
        cols.push(vec![1.0; self.n_rows()]);
        cols.extend(self.cols.iter().cloned());
        cols
    }

    fn check_rows(&self) -> Result<(), StatsError> {
        let needed = self.cols.len() + 1;
        if self.n_rows() < needed {
            return Err(StatsError::TooFew { needed, got: self.n_rows() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ModelKind {
    Linear,
    Logistic,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Logistic => "logistic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub intercept: f64,
    pub names: Vec<String>,
    /// One per name; predictors dropped for rank deficiency have 0.
    pub coefs: Vec<f64>,
    /// Predictors dropped as linearly dependent on earlier ones.
    pub dropped: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
}

impl FittedModel {
    /// Number of predictors that entered the fit.
    pub fn retained(&self) -> usize {
        self.names.len() - self.dropped.len()
    }

    /// Linear predictor for a row aligned with `names`.
    pub fn eta(&self, row: &[f64]) -> f64 {
        self.intercept + self.coefs.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }

    /// Prediction for a row aligned with `names`: the fitted value for a
    /// linear model, the probability of class 1 for a logistic one.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let eta = self.eta(row);
        match self.kind {
            ModelKind::Linear => eta,
            ModelKind::Logistic => sigmoid(eta),
        }
    }

    /// Prediction for a row described by its own column names.
    pub fn predict_named(&self, columns: &[String], row: &[f64]) -> Result<f64, StatsError> {
        let aligned = self
            .names
            .iter()
            .map(|n| {
                columns
                    .iter()
                    .position(|c| c == n)
                    .and_then(|j| row.get(j).copied())
                    .ok_or_else(|| StatsError::MissingPredictor(n.clone()))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(self.predict(&aligned))
    }

    /// Predictions for every row of `m`, matching predictors by name.
    pub fn predict_all(&self, m: &DesignMatrix) -> Result<Vec<f64>, StatsError> {
        (0..m.n_rows()).map(|i| self.predict_named(&m.names, &m.row(i))).collect()
    }

    /// Logistic classification: defective when the probability exceeds 0.5.
    pub fn classify(&self, row: &[f64]) -> bool {
        self.predict(row) > 0.5
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + libm::exp(-eta))
    } else {
        let e = libm::exp(eta);
        e / (1.0 + e)
    }
}

/// log(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// Ordinary least squares with an intercept.
pub fn fit_linear(m: &DesignMatrix) -> Result<FittedModel, StatsError> {
    m.check_rows()?;
    let ls = least_squares(&m.with_intercept(), &m.y);
    let dropped = m
        .names
        .iter()
        .enumerate()
        .filter(|(j, _)| !ls.kept.contains(&(j + 1)))
        .map(|(_, n)| n.clone())
        .collect();
    Ok(FittedModel {
        kind: ModelKind::Linear,
        intercept: ls.coef[0],
        names: m.names.clone(),
        coefs: ls.coef[1..].to_vec(),
        dropped,
        converged: true,
        iterations: 1,
    })
}

const MAX_ITER: usize = 25;
const SCORE_TOL: f64 = 1e-8;

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares with step halving. Predictors are standardised internally; the
/// convergence test (max |score| < 1e-8) applies to the standardised design.
/// When the data are separable the iteration cap is reached and the model is
/// returned with `converged == false`.
pub fn fit_logistic(m: &DesignMatrix) -> Result<FittedModel, StatsError> {
    m.check_rows()?;
    if let Some(&bad) = m.y.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(StatsError::NotBinary(bad));
    }
    let positives = m.y.iter().filter(|&&v| v == 1.0).count();
    if positives == 0 || positives == m.n_rows() {
        return Err(StatsError::SingleClass);
    }
    let n = m.n_rows();
    let nf = n as f64;
    let mut centers = Vec::with_capacity(m.cols.len());
    let mut scales = Vec::with_capacity(m.cols.len());
    let mut z_cols = vec![vec![1.0; n]];
    for c in &m.cols {
        let mean = c.iter().sum::<f64>() / nf;
        let sd = libm::sqrt(c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf);
        let sd = if sd > 0.0 { sd } else { 1.0 };
        centers.push(mean);
        scales.push(sd);
        z_cols.push(c.iter().map(|v| (v - mean) / sd).collect());
    }
    let active = least_squares(&z_cols, &m.y).kept;
    let x: Vec<&Vec<f64>> = active.iter().map(|&j| &z_cols[j]).collect();
    let p = x.len();

    let eta_of = |beta: &[f64]| -> Vec<f64> {
        (0..n).map(|i| x.iter().zip(beta).map(|(c, b)| c[i] * b).sum::<f64>()).collect()
    };
    let loglik = |eta: &[f64]| -> f64 { eta.iter().zip(&m.y).map(|(e, y)| y * e - softplus(*e)).sum() };
    let max_score = |eta: &[f64]| -> f64 {
        let resid: Vec<f64> = eta.iter().zip(&m.y).map(|(e, y)| y - sigmoid(*e)).collect();
        x.iter()
            .map(|c| libm::fabs(c.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>()))
            .fold(0.0, f64::max)
    };

    let mut beta = vec![0.0; p];
    let mut eta = eta_of(&beta);
    let mut converged = false;
    let mut iterations = 0;
    // Under separation the score vanishes while the coefficients keep
    // growing, so a small score only counts once the steps have settled.
    let mut last_step = f64::INFINITY;
    let settled = |step: f64, beta: &[f64]| {
        let scale = 1.0 + beta.iter().fold(0.0f64, |m, b| m.max(libm::fabs(*b)));
        step <= 1e-6 * scale
    };
    while iterations < MAX_ITER {
        if max_score(&eta) < SCORE_TOL && settled(last_step, &beta) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut wcols = vec![Vec::with_capacity(n); p];
        let mut wz = Vec::with_capacity(n);
        for i in 0..n {
            let pi = sigmoid(eta[i]);
            let w = (pi * (1.0 - pi)).max(1e-10);
            let sw = libm::sqrt(w);
            for (wc, c) in wcols.iter_mut().zip(&x) {
                wc.push(c[i] * sw);
            }
            wz.push((m.y[i] - pi) / sw);
        }
        let delta = least_squares(&wcols, &wz).coef;
        let mut next: Vec<f64> = beta.iter().zip(&delta).map(|(b, d)| b + d).collect();
        let old_ll = loglik(&eta);
        let floor = old_ll - 1e-12 * (1.0 + libm::fabs(old_ll));
        let mut next_eta = eta_of(&next);
        let mut halvings = 0;
        while loglik(&next_eta) < floor && halvings < 30 {
            for (nb, b) in next.iter_mut().zip(&beta) {
                *nb = 0.5 * (*nb + b);
            }
            next_eta = eta_of(&next);
            halvings += 1;
        }
        last_step = next.iter().zip(&beta).fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)));
        beta = next;
        eta = next_eta;
    }
    if !converged && max_score(&eta) < SCORE_TOL && settled(last_step, &beta) {
        converged = true;
    }

    let mut gamma = vec![0.0; m.cols.len() + 1];
    for (&j, b) in active.iter().zip(&beta) {
        gamma[j] = *b;
    }
    let coefs: Vec<f64> = (0..m.cols.len()).map(|j| gamma[j + 1] / scales[j]).collect();
    let intercept = gamma[0] - coefs.iter().zip(&centers).map(|(b, c)| b * c).sum::<f64>();
    let dropped = (0..m.cols.len()).filter(|j| !active.contains(&(j + 1))).map(|j| m.names[j].clone()).collect();
    Ok(FittedModel {
        kind: ModelKind::Logistic,
        intercept,
        names: m.names.clone(),
        coefs,
        dropped,
        converged,
        iterations,
    })
}

/// Adjusted R² of a linear model on its design: 1 − (1 − R²)(n − 1)/(n − p − 1)
/// with p the number of retained predictors. A constant response is fitted
/// exactly, so R² = 1 there.
pub fn adjusted_r2(m: &DesignMatrix, model: &FittedModel) -> Result<f64, StatsError> {
    let n = m.n_rows();
    let p = model.retained();
    if n < p + 2 {
        return Err(StatsError::NoDegreesOfFreedom { n, p });
    }
    let pred = model.predict_all(m)?;
    let mean = m.y.iter().sum::<f64>() / n as f64;
    let rss: f64 = pred.iter().zip(&m.y).map(|(a, b)| (a - b) * (a - b)).sum();
    let tss: f64 = m.y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r2 = if tss == 0.0 { 1.0 } else { 1.0 - rss / tss };
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n - p - 1) as f64)
}
