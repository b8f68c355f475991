//! Named-column numeric tables over methods or files.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::aggregate::{aggregate_all, column_name, file_columns, Technique};
use crate::error::{AggregateError, StatsError};
use crate::metrics::{Metric, MethodMetrics};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    columns: Vec<String>,
    /// Entity identifiers, one per row.
    rows: Vec<String>,
    /// Row-major values.
    data: Vec<f64>,
}

impl MetricMatrix {
    pub fn new(columns: Vec<String>) -> Self {
        MetricMatrix { columns, rows: Vec::new(), data: Vec::new() }
    }

    pub fn from_rows(columns: Vec<String>, rows: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        let mut m = MetricMatrix::new(columns);
        for (id, values) in rows {
            m.push_row(id, &values)?;
        }
        Ok(m)
    }

    /// Build from named columns of equal length; rows get ids `0`, `1`, ...
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        let n = columns.first().map_or(0, |c| c.1.len());
        let names: Vec<String> = columns.iter().map(|c| c.0.clone()).collect();
        for (_, c) in &columns {
            if c.len() != n {
                return Err(StatsError::LengthMismatch(n, c.len()));
            }
        }
        let mut m = MetricMatrix::new(names);
        for i in 0..n {
            let row: Vec<f64> = columns.iter().map(|c| c.1[i]).collect();
            m.push_row(i.to_string(), &row)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, id: String, values: &[f64]) -> Result<(), StatsError> {
        if values.len() != self.columns.len() {
            return Err(StatsError::LengthMismatch(self.columns.len(), values.len()));
        }
        self.rows.push(id);
        self.data.extend_from_slice(values);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row_ids(&self) -> &[String] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.columns.len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.columns.len() + j]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        self.column_index(name).map(|j| self.column(j))
    }

    /// Keep only `names`, in the given order.
    pub fn select(&self, names: &[String]) -> Result<MetricMatrix, StatsError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column_index(n).ok_or_else(|| StatsError::MissingPredictor(n.clone())))
            .collect::<Result<_, _>>()?;
        let mut out = MetricMatrix::new(names.to_vec());
        for i in 0..self.n_rows() {
            let row: Vec<f64> = idx.iter().map(|&j| self.get(i, j)).collect();
            out.push_row(self.rows[i].clone(), &row)?;
        }
        Ok(out)
    }

    /// Rows at the given positions, in that order.
    pub fn take_rows(&self, idx: &[usize]) -> MetricMatrix {
        let mut out = MetricMatrix::new(self.columns.clone());
        for &i in idx {
            out.rows.push(self.rows[i].clone());
            out.data.extend_from_slice(self.row(i));
        }
        out
    }

    /// Method-level matrix with the twelve metric columns; rows are `file:line:name`.
    pub fn from_methods(methods: &[MethodMetrics]) -> MetricMatrix {
        let mut m = MetricMatrix::new(Metric::ALL.iter().map(|m| m.name().to_string()).collect());
        for mm in methods {
            m.rows.push(alloc::format!("{}:{}:{}", mm.file, mm.start_line, mm.method));
            m.data.extend_from_slice(&mm.values());
        }
        m
    }

    /// Aggregate rows grouped by `groups[i]` (one key per row). Output rows
    /// are the distinct keys in ascending order; output columns are
    /// `<column>.<technique>` for every input column, techniques in priority
    /// order.
    pub fn aggregate_groups(&self, groups: &[String]) -> Result<MetricMatrix, AggregateError> {
        if groups.len() != self.n_rows() {
            return Err(AggregateError::GroupLength { rows: self.n_rows(), groups: groups.len() });
        }
        let mut by_key: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            by_key.entry(g.as_str()).or_default().push(i);
        }
        let columns = self
            .columns
            .iter()
            .flat_map(|c| Technique::ALL.map(|t| column_name(c, t)))
            .collect();
        let mut out = MetricMatrix::new(columns);
        for (key, idx) in by_key {
            let mut row = Vec::with_capacity(self.n_cols() * 9);
            for j in 0..self.n_cols() {
                let values: Vec<f64> = idx.iter().map(|&i| self.get(i, j)).collect();
                row.extend(aggregate_all(&values)?);
            }
            out.rows.push(key.to_string());
            out.data.extend(row);
        }
        Ok(out)
    }

    /// File-level 108-column matrix from extracted methods grouped by file.
    pub fn file_level(methods: &[MethodMetrics]) -> Result<MetricMatrix, AggregateError> {
        let groups: Vec<String> = methods.iter().map(|m| m.file.clone()).collect();
        let m = MetricMatrix::from_methods(methods).aggregate_groups(&groups)?;
        debug_assert_eq!(m.columns, file_columns());
        Ok(m)
    }
}
