//! Predictor filtering: correlation clustering with one representative per
//! cluster, then iterative removal of variables that the others predict well.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::aggregate::Technique;
use crate::error::FilterError;
use crate::matrix::MetricMatrix;
use crate::metrics::Metric;
use crate::stats::{adjusted_r2, fit_linear, try_spearman, DesignMatrix};

/// Two adjusted R² values closer than this are treated as tied.
pub const R2_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Variables are clustered together when |ρ| exceeds this.
    pub cluster_threshold: f64,
    /// Variables with adjusted R² at or above this are dropped.
    pub redundancy_cutoff: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { cluster_threshold: 0.7, redundancy_cutoff: 0.9 }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        for t in [self.cluster_threshold, self.redundancy_cutoff] {
            if !(t > 0.0 && t < 1.0) {
                return Err(FilterError::Threshold(t));
            }
        }
        Ok(())
    }
}

/// Sort key of a variable name: technique priority, then metric order.
/// Bare metric names (method level) sort before any aggregated column;
/// names outside the scheme sort last, lexically.
pub fn priority_key(name: &str) -> (u8, usize, String) {
    let (base, tech) = match name.rsplit_once('.') {
        Some((b, t)) => match t.parse::<Technique>() {
            Ok(t) => (b, t.rank()),
            Err(()) => (name, u8::MAX),
        },
        None => (name, 0),
    };
    match base.parse::<Metric>() {
        Ok(m) if tech != u8::MAX => (tech, m.index(), String::from(name)),
        _ => (u8::MAX, usize::MAX, String::from(name)),
    }
}

fn key_cmp(a: &str, b: &str) -> Ordering {
    priority_key(a).cmp(&priority_key(b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Cluster ids: `0..n` are the variables, `n + k` is the k-th merge.
    pub left: usize,
    pub right: usize,
    /// 1 − |ρ| averaged over all cross pairs.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree {
    pub names: Vec<String>,
    pub merges: Vec<Merge>,
    /// |ρ| between every pair of variables (0 where undefined).
    pub abs_rho: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl ClusterTree {
    /// Clusters left after applying every merge strictly below `max_height`.
    /// Members are variable indices in ascending order; clusters are ordered
    /// by their smallest member.
    pub fn cut(&self, max_height: f64) -> Vec<Vec<usize>> {
        let n = self.names.len();
        let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
        for m in &self.merges {
            if m.height < max_height {
                let mut a = members[m.left].take().unwrap_or_default();
                a.extend(members[m.right].take().unwrap_or_default());
                a.sort_unstable();
                members.push(Some(a));
            } else {
                members.push(None);
            }
        }
        let mut out: Vec<Vec<usize>> = members.into_iter().flatten().filter(|c| !c.is_empty()).collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    /// Clusters whose members correlate above `rho_threshold` (|ρ| > t, i.e.
    /// merge height < 1 − t).
    pub fn clusters(&self, rho_threshold: f64) -> Vec<Vec<usize>> {
        self.cut(1.0 - rho_threshold)
    }
}

/// Average-linkage agglomerative clustering of the columns of `m` on the
/// distance 1 − |Spearman ρ|. A constant column has no defined correlation;
/// it is treated as uncorrelated with everything and a warning is recorded.
pub fn varclus(m: &MetricMatrix) -> Result<ClusterTree, FilterError> {
    let n = m.n_cols();
    if n < 2 {
        return Err(FilterError::TooFewVariables { needed: 2, got: n });
    }
    if m.n_rows() < 3 {
        return Err(FilterError::TooFewRows { needed: 3, got: m.n_rows() });
    }
    let cols: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
    let mut warnings = Vec::new();
    let constant: Vec<bool> = cols.iter().map(|c| c.iter().all(|&v| v == c[0])).collect();
    for (j, &c) in constant.iter().enumerate() {
        if c {
            warnings.push(format!("`{}` is constant; isolated from clustering", m.columns()[j]));
        }
    }
    let mut abs_rho = vec![vec![0.0; n]; n];
    for i in 0..n {
        abs_rho[i][i] = 1.0;
        for j in i + 1..n {
            let r = if constant[i] || constant[j] {
                0.0
            } else {
                libm::fabs(try_spearman(&cols[i], &cols[j])?.unwrap_or(0.0))
            };
            abs_rho[i][j] = r;
            abs_rho[j][i] = r;
        }
    }
    // active clusters: (id, members)
    let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                let (ma, mb) = (&active[a].1, &active[b].1);
                let total: f64 = ma.iter().flat_map(|&i| mb.iter().map(move |&j| (i, j))).map(|(i, j)| 1.0 - abs_rho[i][j]).sum();
                let d = total / (ma.len() * mb.len()) as f64;
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (height, a, b) = best.expect("at least two active clusters");
        let (id_b, mb) = active.remove(b);
        let (id_a, ma) = core::mem::take(&mut active[a]);
        let mut members = ma;
        members.extend(mb);
        merges.push(Merge { left: id_a, right: id_b, height });
        active[a] = (n + merges.len() - 1, members);
    }
    Ok(ClusterTree { names: m.columns().to_vec(), merges, abs_rho, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Phase {
    Cluster,
    Redundancy,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discard {
    pub var: String,
    pub phase: Phase,
    /// |ρ| with the cluster representative, or the adjusted R² at removal.
    pub value: f64,
    /// The representative that replaced a clustered variable.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub kept: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterReport {
    pub input: Vec<String>,
    /// Survivors, in input order.
    pub retained: Vec<String>,
    /// Removals, in the order they happened.
    pub discarded: Vec<Discard>,
    pub warnings: Vec<String>,
}

impl FilterReport {
    fn keep_all(input: &[String]) -> Self {
        FilterReport { input: input.to_vec(), retained: input.to_vec(), ..Default::default() }
    }
}

/// Keep one variable per cluster of the cut at |ρ| > `threshold`: the one
/// with the smallest [`priority_key`].
pub fn select_representatives(tree: &ClusterTree, threshold: f64) -> FilterReport {
    let mut report = FilterReport::keep_all(&tree.names);
    report.warnings = tree.warnings.clone();
    let mut dropped = vec![false; tree.names.len()];
    for cluster in tree.clusters(threshold) {
        if cluster.len() < 2 {
            continue;
        }
        let rep = *cluster
            .iter()
            .min_by(|&&a, &&b| key_cmp(&tree.names[a], &tree.names[b]))
            .expect("non-empty cluster");
        for &v in &cluster {
            if v != rep {
                dropped[v] = true;
                report.discarded.push(Discard {
                    var: tree.names[v].clone(),
                    phase: Phase::Cluster,
                    value: tree.abs_rho[v][rep],
                    kept: Some(tree.names[rep].clone()),
                });
            }
        }
    }
    report.retained = tree.names.iter().zip(&dropped).filter(|(_, &d)| !d).map(|(n, _)| n.clone()).collect();
    report
}

/// Adjusted R² of predicting `target` from `others`; a failed fit counts as 1.
pub fn r2_against(m: &MetricMatrix, target: &str, others: &[String]) -> f64 {
    let Some(y) = m.column_by_name(target) else { return 1.0 };
    DesignMatrix::from_matrix(m, others, &y)
        .and_then(|dm| fit_linear(&dm).and_then(|f| adjusted_r2(&dm, &f)))
        .unwrap_or(1.0)
}

/// Repeatedly fit every variable on all the others and drop the best
/// predicted one while its adjusted R² is at least `cutoff`. Among ties the
/// variable with the largest [`priority_key`] goes first.
pub fn redun_eliminate(m: &MetricMatrix, cutoff: f64) -> Result<FilterReport, FilterError> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(FilterError::Threshold(cutoff));
    }
    let mut report = FilterReport::keep_all(m.columns());
    let mut vars: Vec<String> = m.columns().to_vec();
    while vars.len() >= 2 {
        let scores: Vec<f64> = vars
            .iter()
            .map(|v| {
                let others: Vec<String> = vars.iter().filter(|o| *o != v).cloned().collect();
                r2_against(m, v, &others)
            })
            .collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max < cutoff {
            break;
        }
        let victim = (0..vars.len())
            .filter(|&i| scores[i] >= max - R2_TIE_TOL)
            .max_by(|&a, &b| key_cmp(&vars[a], &vars[b]))
            .expect("some variable attains the maximum");
        report.discarded.push(Discard { var: vars[victim].clone(), phase: Phase::Redundancy, value: scores[victim], kept: None });
        vars.remove(victim);
    }
    report.retained = vars;
    Ok(report)
}

/// Clustering then redundancy elimination on every column of `m`.
pub fn one_level_filter(m: &MetricMatrix, cfg: &FilterConfig) -> Result<FilterReport, FilterError> {
    cfg.validate()?;
    if m.n_cols() < 2 {
        return Ok(FilterReport::keep_all(m.columns()));
    }
    let tree = varclus(m)?;
    let mut report = select_representatives(&tree, cfg.cluster_threshold);
    let survivors = m.select(&report.retained)?;
    let redun = redun_eliminate(&survivors, cfg.redundancy_cutoff)?;
    report.retained = redun.retained;
    report.discarded.extend(redun.discarded);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoLevelReport {
    /// Filtering of the method-level metrics.
    pub method_level: FilterReport,
    /// Filtering of the aggregated survivors.
    pub file_level: FilterReport,
}

impl TwoLevelReport {
    pub fn retained(&self) -> &[String] {
        &self.file_level.retained
    }
}

/// Filter the method-level metrics, aggregate the survivors per group with
/// all nine techniques, and filter the aggregated columns again.
pub fn two_level_filter(
    methods: &MetricMatrix,
    groups: &[String],
    cfg: &FilterConfig,
) -> Result<(TwoLevelReport, MetricMatrix), FilterError> {
    let method_level = one_level_filter(methods, cfg)?;
    let files = methods.select(&method_level.retained)?.aggregate_groups(groups)?;
    let file_level = one_level_filter(&files, cfg)?;
    Ok((TwoLevelReport { method_level, file_level }, files))
}
