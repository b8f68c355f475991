use alloc::vec;
use alloc::vec::Vec;

use super::rank::mid_ranks;
use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Whether `p` comes from the exact null distribution.
    pub exact: bool,
}

fn check(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// U of `a` and the tie-group sizes of the pooled sample.
fn u_and_ties(a: &[f64], b: &[f64]) -> (f64, Vec<usize>) {
    let mut pooled = a.to_vec();
    pooled.extend_from_slice(b);
    let ranks = mid_ranks(&pooled);
    let na = a.len() as f64;
    let r_a: f64 = ranks[..a.len()].iter().sum();
    pooled.sort_by(f64::total_cmp);
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let j = pooled[i..].iter().take_while(|&&v| v == pooled[i]).count();
        if j > 1 {
            ties.push(j);
        }
        i += j;
    }
    (r_a - na * (na + 1.0) / 2.0, ties)
}

/// Two-sided test with the exact null distribution when both samples have at
/// most 8 values and there are no ties, the normal approximation otherwise.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    check(a, b)?;
    let (_, ties) = u_and_ties(a, b);
    if a.len().max(b.len()) <= 8 && ties.is_empty() {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

/// Exact two-sided p-value: twice the smaller tail of the rank-sum
/// distribution over all equally likely assignments of ranks to `a`.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    check(a, b)?;
    let (u, ties) = u_and_ties(a, b);
    if !ties.is_empty() {
        return Err(StatsError::Ties);
    }
    let (na, nb) = (a.len(), b.len());
    let max_u = na * nb;
    // counts[k][s]: ways to pick k of the first i ranks with U-contribution s,
    // where choosing rank r (0-based) after k earlier picks adds r - k.
    let mut counts = vec![vec![0.0f64; max_u + 1]; na + 1];
    counts[0][0] = 1.0;
    for r in 0..na + nb {
        for k in (0..na.min(r + 1)).rev() {
            if r < k || r - k > nb {
                continue;
            }
            let add = r - k;
            for s in (0..=max_u - add).rev() {
                let c = counts[k][s];
                if c != 0.0 {
                    counts[k + 1][s + add] += c;
                }
            }
        }
    }
    let dist = &counts[na];
    let total: f64 = dist.iter().sum();
    let ui = libm::round(u) as usize;
    let lower: f64 = dist[..=ui].iter().sum::<f64>() / total;
    let upper: f64 = dist[ui..].iter().sum::<f64>() / total;
    Ok(MannWhitney { u, p: (2.0 * lower.min(upper)).min(1.0), exact: true })
}

/// Normal approximation with tie and continuity corrections.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    check(a, b)?;
    let (u, ties) = u_and_ties(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let mean = na * nb / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = na * nb / 12.0 * ((n + 1.0) - if n > 1.0 { tie_term / (n * (n - 1.0)) } else { 0.0 });
    if var <= 0.0 {
        return Ok(MannWhitney { u, p: 1.0, exact: false });
    }
    let z = (libm::fabs(u - mean) - 0.5).max(0.0) / libm::sqrt(var);
    Ok(MannWhitney { u, p: libm::erfc(z / core::f64::consts::SQRT_2).min(1.0), exact: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(abs_d: f64) -> Magnitude {
        if abs_d < 0.147 {
            Magnitude::Negligible
        } else if abs_d < 0.33 {
            Magnitude::Small
        } else if abs_d < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectSize {
    pub cliffs_d: f64,
    pub magnitude: Magnitude,
}

/// Cliff's d = (#{a > b} − #{a < b}) / (|a| |b|).
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<EffectSize, StatsError> {
    check(a, b)?;
    let mut sorted_b = b.to_vec();
    sorted_b.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for &x in a {
        let below = sorted_b.partition_point(|&v| v < x) as i64;
        let above = (sorted_b.len() - sorted_b.partition_point(|&v| v <= x)) as i64;
        dominance += below - above;
    }
    let d = dominance as f64 / (a.len() * b.len()) as f64;
    Ok(EffectSize { cliffs_d: d, magnitude: Magnitude::of(libm::fabs(d)) })
}
