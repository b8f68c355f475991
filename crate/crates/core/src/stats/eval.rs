use super::rank::mid_ranks;
use crate::error::StatsError;

/// Mean squared error.
pub fn mse(predicted: &[f64], actual: &[f64]) -> Result<f64, StatsError> {
    if predicted.len() != actual.len() {
        return Err(StatsError::LengthMismatch(predicted.len(), actual.len()));
    }
    if predicted.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let sum: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok(sum / predicted.len() as f64)
}

/// Area under the ROC curve from the rank-sum of the positive scores; tied
/// scores get half credit.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, StatsError> {
    if scores.len() != labels.len() {
        return Err(StatsError::LengthMismatch(scores.len(), labels.len()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(StatsError::SingleClass);
    }
    let ranks = mid_ranks(scores);
    let r_pos: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((r_pos - p * (p + 1.0) / 2.0) / (p * q))
}
