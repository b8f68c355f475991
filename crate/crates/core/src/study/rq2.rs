//! Redundancy measure of each aggregation of a metric.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::table::{Cell, RqTable};
use super::Dataset;
use crate::aggregate::{column_name, Technique};
use crate::error::StudyError;
use crate::filtering::{r2_against, select_representatives, varclus, FilterConfig};
use crate::metrics::Metric;

/// Score each of the nine aggregations of `metric` in [0, 1]: 1 when
/// clustering discards it, otherwise the adjusted R² (clamped to [0, 1]) of
/// predicting it from the other survivors, or 0 when it is the only survivor.
pub fn redundancy_measures(d: &Dataset, metric: Metric, cfg: &FilterConfig) -> Result<[f64; 9], StudyError> {
    cfg.validate()?;
    if d.n_files() < 3 {
        return Err(StudyError::TooSmall(alloc::format!("need at least 3 files, got {}", d.n_files())));
    }
    let names: Vec<String> = Technique::ALL.iter().map(|&t| column_name(metric.name(), t)).collect();
    let sub = d.files.select(&names)?;
    let report = select_representatives(&varclus(&sub)?, cfg.cluster_threshold);
    let mut out = [1.0; 9];
    for (slot, name) in out.iter_mut().zip(&names) {
        if !report.retained.contains(name) {
            continue;
        }
        let others: Vec<String> = report.retained.iter().filter(|o| *o != name).cloned().collect();
        *slot = if others.is_empty() { 0.0 } else { r2_against(&sub, name, &others).clamp(0.0, 1.0) };
    }
    Ok(out)
}

/// One row per dataset: `dataset,sum,...,gini`.
pub fn rq2_table(metric: Metric, rows: &[(String, [f64; 9])]) -> RqTable {
    let mut header = vec!["dataset".to_string()];
    header.extend(Technique::ALL.iter().map(|t| t.name().to_string()));
    let mut t = RqTable::new(alloc::format!("Redundancy of the aggregations of {metric}"), header);
    for (name, values) in rows {
        let mut cells = vec![Cell::text(name.clone())];
        cells.extend(values.iter().map(|&v| Cell::Num(Some(v))));
        t.push(cells);
    }
    t
}
