//! Seeded synthetic corpus: method sizes are log-normal, the other metrics
//! are noisy monotone functions of size, and per-file defect counts are
//! Poisson with a rate increasing in the file's total LOC.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};

use super::Dataset;
use crate::error::StudyError;
use crate::halstead::HalsteadCounts;
use crate::metrics::MethodMetrics;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthParams {
    pub files: usize,
    /// Mean methods per file; counts are 1 + Geometric.
    pub mean_methods: f64,
    /// Median method LOC.
    pub loc_median: f64,
    /// Log-scale spread of method LOC; 0 gives identical sizes.
    pub loc_sigma: f64,
    /// v(G) = 1 + slope * LOC + noise.
    pub vg_slope: f64,
    pub vg_noise: f64,
    pub defects: DefectRate,
}

/// Poisson rate of a file's defect count as a function of its total LOC `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DefectRate {
    /// rate = per_loc * s.
    Proportional { per_loc: f64 },
    /// rate = ln(1 + exp(intercept + slope * s)), so that
    /// P(defective) = sigmoid(intercept + slope * s) exactly.
    Softplus { intercept: f64, slope: f64 },
}

impl DefectRate {
    pub fn rate(&self, total_loc: f64) -> f64 {
        match *self {
            DefectRate::Proportional { per_loc } => per_loc * total_loc,
            DefectRate::Softplus { intercept, slope } => {
                let x = intercept + slope * total_loc;
                if x > 0.0 { x + libm::log1p(libm::exp(-x)) } else { libm::log1p(libm::exp(x)) }
            }
        }
    }

    fn validate(&self) -> Result<(), &'static str> {
        match *self {
            DefectRate::Proportional { per_loc } if !(per_loc > 0.0 && per_loc.is_finite()) => {
                Err("per_loc must be positive")
            }
            DefectRate::Softplus { intercept, slope } if !(slope > 0.0 && slope.is_finite() && intercept.is_finite()) => {
                Err("slope must be positive and intercept finite")
            }
            _ => Ok(()),
        }
    }
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            files: 200,
            mean_methods: 8.0,
            loc_median: 10.0,
            loc_sigma: 0.9,
            vg_slope: 0.15,
            vg_noise: 2.0,
            defects: DefectRate::Softplus { intercept: -1.5, slope: 0.01 },
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), StudyError> {
        let bad = |what: &str| Err(StudyError::Argument(format!("invalid generator parameter: {what}")));
        if self.files == 0 {
            return bad("files must be positive");
        }
        if !(self.mean_methods >= 1.0 && self.mean_methods.is_finite()) {
            return bad("mean_methods must be at least 1");
        }
        if !(self.loc_median >= 1.0 && self.loc_median.is_finite()) {
            return bad("loc_median must be at least 1");
        }
        if !(self.loc_sigma >= 0.0 && self.loc_sigma.is_finite()) {
            return bad("loc_sigma must be non-negative");
        }
        if !(self.vg_slope >= 0.0 && self.vg_slope.is_finite()) {
            return bad("vg_slope must be non-negative");
        }
        if !(self.vg_noise >= 0.0 && self.vg_noise.is_finite()) {
            return bad("vg_noise must be non-negative");
        }
        self.defects.validate().or_else(bad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub methods: Vec<MethodMetrics>,
    /// Defect count per file.
    pub bugs: BTreeMap<String, u64>,
}

impl SynthCorpus {
    pub fn dataset(&self, name: &str) -> Result<Dataset, StudyError> {
        Dataset::join(name, &self.methods, &self.bugs).map(|(d, _)| d)
    }
}

pub fn file_name(i: usize) -> String {
    format!("synth/f{:04}.java", i + 1)
}

fn halstead_for(loc: u32, rng: &mut ChaCha8Rng) -> HalsteadCounts {
    let tokens = libm::round(loc as f64 * rng.random_range(4.0..8.0)).max(2.0) as usize;
    let big_n1 = ((tokens as f64 * rng.random_range(0.5..0.6)) as usize).max(1);
    let big_n2 = tokens - big_n1;
    let n1 = ((1.5 * libm::sqrt(big_n1 as f64)) as usize + 1).min(big_n1);
    let n2 = if big_n2 == 0 { 0 } else { ((2.0 * libm::sqrt(big_n2 as f64)) as usize).clamp(1, big_n2) };
    HalsteadCounts { n1, n2, big_n1, big_n2 }
}

fn method(file: &str, index: usize, line: u32, p: &SynthParams, rng: &mut ChaCha8Rng) -> MethodMetrics {
    let z: f64 = Normal::new(0.0, 1.0).map(|n| n.sample(rng)).unwrap_or(0.0);
    let loc = libm::round(libm::exp(libm::log(p.loc_median) + p.loc_sigma * z)).max(1.0) as u32;
    let noise = if p.vg_noise > 0.0 { Normal::new(0.0, p.vg_noise).map(|n| n.sample(rng)).unwrap_or(0.0) } else { 0.0 };
    let vg = libm::round(p.vg_slope * loc as f64 + noise).max(1.0) as u32;
    let evg = if vg == 1 || rng.random_bool(0.8) { 1 } else { rng.random_range(2..=vg) };
    let ivg = 1 + (1..vg).filter(|_| rng.random_bool(0.5)).count() as u32;
    let h = halstead_for(loc, rng).measures();
    MethodMetrics {
        file: String::from(file),
        method: format!("m{index}"),
        start_line: line,
        loc,
        vg,
        evg,
        ivg,
        hal_n: h.n,
        hal_v: h.v,
        hal_l: h.l,
        hal_d: h.d,
        hal_i: h.i,
        hal_e: h.e,
        hal_b: h.b,
        hal_t: h.t,
    }
}

/// Generate a corpus; identical for identical (params, seed).
pub fn synth_corpus(params: &SynthParams, seed: u64) -> Result<SynthCorpus, StudyError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = Geometric::new(1.0 / params.mean_methods)
        .map_err(|e| StudyError::Argument(format!("invalid generator parameter: {e}")))?;
    let mut methods = Vec::new();
    let mut bugs = BTreeMap::new();
    for i in 0..params.files {
        let file = file_name(i);
        let count = 1 + extra.sample(&mut rng) as usize;
        let mut line = 1;
        let mut total_loc = 0u64;
        for j in 0..count {
            let m = method(&file, j, line, params, &mut rng);
            line += m.loc + 1;
            total_loc += m.loc as u64;
            methods.push(m);
        }
        let rate = params.defects.rate(total_loc as f64);
        let defects = Poisson::new(rate).map(|d| d.sample(&mut rng) as u64).unwrap_or(0);
        bugs.insert(file, defects);
    }
    Ok(SynthCorpus { methods, bugs })
}
