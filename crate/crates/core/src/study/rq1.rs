//! Change in |ρ| with LOC when metrics are lifted from methods to files.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::table::{Cell, RqTable};
use super::Dataset;
use crate::aggregate::{column_name, Technique};
use crate::error::StudyError;
use crate::metrics::Metric;
use crate::stats::try_spearman;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rq1Cell {
    /// |ρ(LOC, M)| over methods.
    pub rho_method: Option<f64>,
    /// |ρ(A(LOC), A(M))| over files.
    pub rho_file: Option<f64>,
    /// ρ_file − ρ_method.
    pub abs: Option<f64>,
    /// (ρ_file − ρ_method) / ρ_method.
    pub rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rq1Result {
    /// Every metric except LOC, in canonical order.
    pub metrics: Vec<Metric>,
    /// `cells[i][t]` for `metrics[i]` and `Technique::ALL[t]`.
    pub cells: Vec<[Rq1Cell; 9]>,
}

impl Rq1Result {
    pub fn cell(&self, m: Metric, t: Technique) -> Option<&Rq1Cell> {
        let i = self.metrics.iter().position(|&x| x == m)?;
        Some(&self.cells[i][t as usize])
    }
}

fn abs_rho(x: &[f64], y: &[f64]) -> Result<Option<f64>, StudyError> {
    Ok(try_spearman(x, y)?.map(libm::fabs))
}

/// For every metric M other than LOC and every technique A, compare
/// |ρ(LOC, M)| over methods with |ρ(A(LOC), A(M))| over files. Undefined
/// correlations (a constant column) leave gaps.
pub fn correlation_increase(d: &Dataset) -> Result<Rq1Result, StudyError> {
    if d.methods.n_rows() < 3 || d.n_files() < 3 {
        return Err(StudyError::TooSmall(format!(
            "need at least 3 methods and 3 files, got {} and {}",
            d.methods.n_rows(),
            d.n_files()
        )));
    }
    let column = |m: &crate::matrix::MetricMatrix, name: &str| {
        m.column_by_name(name).ok_or_else(|| StudyError::Argument(format!("missing column `{name}`")))
    };
    let loc = column(&d.methods, Metric::Loc.name())?;
    let mut metrics = Vec::new();
    let mut cells = Vec::new();
    for m in Metric::ALL.into_iter().filter(|&m| m != Metric::Loc) {
        let rho_method = abs_rho(&loc, &column(&d.methods, m.name())?)?;
        let mut row = [Rq1Cell::default(); 9];
        for (slot, t) in row.iter_mut().zip(Technique::ALL) {
            let a_loc = column(&d.files, &column_name(Metric::Loc.name(), t))?;
            let a_m = column(&d.files, &column_name(m.name(), t))?;
            let rho_file = abs_rho(&a_loc, &a_m)?;
            let abs = rho_method.zip(rho_file).map(|(pm, pf)| pf - pm);
            let rel = abs.zip(rho_method).and_then(|(a, pm)| (pm > 0.0).then(|| a / pm));
            *slot = Rq1Cell { rho_method, rho_file, abs, rel };
        }
        metrics.push(m);
        cells.push(row);
    }
    Ok(Rq1Result { metrics, cells })
}

/// Grid with one row per (metric, delta kind); relative deltas first.
pub fn rq1_table(dataset: &str, r: &Rq1Result) -> RqTable {
    let mut header: Vec<String> = vec!["dataset".into(), "metric".into(), "delta".into(), "rho_method".into()];
    header.extend(Technique::ALL.iter().map(|t| t.name().to_string()));
    let mut table = RqTable::new("Change in |rho| with LOC after aggregation", header);
    for kind in ["rel", "abs"] {
        for (m, row) in r.metrics.iter().zip(&r.cells) {
            let mut cells = vec![Cell::text(dataset), Cell::text(m.name()), Cell::text(kind), Cell::Num(row[0].rho_method)];
            cells.extend(row.iter().map(|c| Cell::Num(if kind == "rel" { c.rel } else { c.abs })));
            table.push(cells);
        }
    }
    table
}
