//! The nine method-to-file aggregation operators.
//!
//! Every operator works on a sorted copy of its input, which makes results
//! exactly independent of input order. Inputs where a formula would divide
//! by zero (a single value, a constant vector, an all-zero vector for the
//! inequality measures) return 0.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::AggregateError;
use crate::metrics::{Metric, MethodMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Technique {
    Sum,
    Avg,
    Med,
    Sd,
    Iqr,
    Skew,
    Kurt,
    Theil,
    Gini,
}

impl Technique {
    /// All techniques in priority order.
    pub const ALL: [Technique; 9] = [
        Technique::Sum,
        Technique::Avg,
        Technique::Med,
        Technique::Sd,
        Technique::Iqr,
        Technique::Skew,
        Technique::Kurt,
        Technique::Theil,
        Technique::Gini,
    ];

    /// Column suffix, e.g. `loc.sum`.
    pub fn name(self) -> &'static str {
        match self {
            Technique::Sum => "sum",
            Technique::Avg => "avg",
            Technique::Med => "med",
            Technique::Sd => "sd",
            Technique::Iqr => "iqr",
            Technique::Skew => "skew",
            Technique::Kurt => "kurt",
            Technique::Theil => "theil",
            Technique::Gini => "gini",
        }
    }

    /// Display label, e.g. `Sum`, `SD`.
    pub fn label(self) -> &'static str {
        match self {
            Technique::Sum => "Sum",
            Technique::Avg => "Avg",
            Technique::Med => "Med",
            Technique::Sd => "SD",
            Technique::Iqr => "IQR",
            Technique::Skew => "Skew",
            Technique::Kurt => "Kurt",
            Technique::Theil => "Theil",
            Technique::Gini => "Gini",
        }
    }

    /// Priority rank, 1 (Sum) to 9 (Gini).
    pub fn rank(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name() == s || t.label() == s)
            .ok_or(())
    }
}

fn sorted(x: &[f64]) -> Result<Vec<f64>, AggregateError> {
    if x.is_empty() {
        return Err(AggregateError::Empty);
    }
    if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(AggregateError::NonFinite(bad));
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let h = (s.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    if lo + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[lo] + (h - lo as f64) * (s[lo + 1] - s[lo])
}

/// Linear-interpolation quantile at `h = (N - 1) q` of the sorted values.
pub fn quantile(x: &[f64], q: f64) -> Result<f64, AggregateError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(AggregateError::QuantileLevel(q));
    }
    Ok(quantile_sorted(&sorted(x)?, q))
}

/// Central moments about the mean: (Σd², Σd³, Σd⁴).
fn moments(s: &[f64], mean: f64) -> (f64, f64, f64) {
    s.iter().fold((0.0, 0.0, 0.0), |(m2, m3, m4), &v| {
        let d = v - mean;
        let d2 = d * d;
        (m2 + d2, m3 + d2 * d, m4 + d2 * d2)
    })
}

fn check_non_negative(s: &[f64], t: Technique) -> Result<(), AggregateError> {
    match s.first() {
        Some(&v) if v < 0.0 => Err(AggregateError::Negative { technique: t.name(), value: v }),
        _ => Ok(()),
    }
}

fn aggregate_sorted(s: &[f64], t: Technique) -> Result<f64, AggregateError> {
    let n = s.len() as f64;
    let sum: f64 = s.iter().sum();
    let mean = sum / n;
    let constant = s[0] == s[s.len() - 1];
    Ok(match t {
        Technique::Sum => sum,
        Technique::Avg => mean,
        Technique::Med => quantile_sorted(s, 0.5),
        Technique::Iqr => quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25),
        Technique::Sd | Technique::Skew | Technique::Kurt if constant => 0.0,
        Technique::Sd => libm::sqrt(moments(s, mean).0 / (n - 1.0)),
        Technique::Skew => {
            let (m2, m3, _) = moments(s, mean);
            (m3 / n) / libm::pow(m2 / (n - 1.0), 1.5)
        }
        Technique::Kurt => {
            let (m2, _, m4) = moments(s, mean);
            let var = m2 / (n - 1.0);
            (m4 / n) / (var * var) - 3.0
        }
        Technique::Theil => {
            check_non_negative(s, t)?;
            if constant || mean == 0.0 {
                return Ok(0.0);
            }
            let total: f64 = s
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| {
                    let r = v / mean;
                    r * libm::log(r)
                })
                .sum();
            (total / n).max(0.0)
        }
        Technique::Gini => {
            check_non_negative(s, t)?;
            if constant || sum == 0.0 {
                return Ok(0.0);
            }
            let weighted: f64 = s.iter().enumerate().map(|(i, &v)| (i + 1) as f64 * v).sum();
            (2.0 * weighted / (n * sum) - (n + 1.0) / n).max(0.0)
        }
    })
}

/// Apply one technique to a non-empty vector of finite values.
pub fn aggregate(x: &[f64], t: Technique) -> Result<f64, AggregateError> {
    aggregate_sorted(&sorted(x)?, t)
}

/// All nine techniques, in priority order.
pub fn aggregate_all(x: &[f64]) -> Result<[f64; 9], AggregateError> {
    let s = sorted(x)?;
    let mut out = [0.0; 9];
    for (slot, t) in out.iter_mut().zip(Technique::ALL) {
        *slot = aggregate_sorted(&s, t)?;
    }
    Ok(out)
}

/// `<base>.<technique>`.
pub fn column_name(base: &str, t: Technique) -> String {
    let mut s = String::with_capacity(base.len() + 6);
    s.push_str(base);
    s.push('.');
    s.push_str(t.name());
    s
}

/// The 108 file-level column names: metric-major, techniques in priority order.
pub fn file_columns() -> Vec<String> {
    Metric::ALL
        .iter()
        .flat_map(|m| Technique::ALL.map(|t| column_name(m.name(), t)))
        .collect()
}

/// One file-level row of 108 values in [`file_columns`] order.
pub fn aggregate_file(methods: &[MethodMetrics]) -> Result<Vec<f64>, AggregateError> {
    if methods.is_empty() {
        return Err(AggregateError::Empty);
    }
    let mut row = Vec::with_capacity(108);
    for m in Metric::ALL {
        let values: Vec<f64> = methods.iter().map(|mm| mm.get(m)).collect();
        row.extend(aggregate_all(&values)?);
    }
    Ok(row)
}
