//! Per-method metric extraction: the twelve measures and their canonical
//! column order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cfg::{build_cfg, cyclomatic, design_complexity, essential, ControlFlowGraph};
use crate::error::{ExtractError, FileError};
use crate::halstead::{self, HalsteadCounts};
use crate::lexer::{tokenize, Token};
use crate::segment::{segment_methods, MethodSpan};
use crate::syntax::{count_ternaries, parse_body};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    Loc,
    Vg,
    Evg,
    Ivg,
    HalN,
    HalV,
    HalL,
    HalD,
    HalI,
    HalE,
    HalB,
    HalT,
}

impl Metric {
    pub const ALL: [Metric; 12] = [
        Metric::Loc,
        Metric::Vg,
        Metric::Evg,
        Metric::Ivg,
        Metric::HalN,
        Metric::HalV,
        Metric::HalL,
        Metric::HalD,
        Metric::HalI,
        Metric::HalE,
        Metric::HalB,
        Metric::HalT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Loc => "loc",
            Metric::Vg => "vg",
            Metric::Evg => "evg",
            Metric::Ivg => "ivg",
            Metric::HalN => "hal_n",
            Metric::HalV => "hal_v",
            Metric::HalL => "hal_l",
            Metric::HalD => "hal_d",
            Metric::HalI => "hal_i",
            Metric::HalE => "hal_e",
            Metric::HalB => "hal_b",
            Metric::HalT => "hal_t",
        }
    }

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Metric::ALL.into_iter().find(|m| m.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodMetrics {
    pub file: String,
    pub method: String,
    pub start_line: u32,
    pub loc: u32,
    pub vg: u32,
    pub evg: u32,
    pub ivg: u32,
    pub hal_n: f64,
    pub hal_v: f64,
    pub hal_l: f64,
    pub hal_d: f64,
    pub hal_i: f64,
    pub hal_e: f64,
    pub hal_b: f64,
    pub hal_t: f64,
}

impl MethodMetrics {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Loc => self.loc as f64,
            Metric::Vg => self.vg as f64,
            Metric::Evg => self.evg as f64,
            Metric::Ivg => self.ivg as f64,
            Metric::HalN => self.hal_n,
            Metric::HalV => self.hal_v,
            Metric::HalL => self.hal_l,
            Metric::HalD => self.hal_d,
            Metric::HalI => self.hal_i,
            Metric::HalE => self.hal_e,
            Metric::HalB => self.hal_b,
            Metric::HalT => self.hal_t,
        }
    }

    pub fn values(&self) -> [f64; 12] {
        Metric::ALL.map(|m| self.get(m))
    }
}

/// Everything computed for one method, including intermediate structures.
#[derive(Debug, Clone)]
pub struct MethodAnalysis {
    pub span: MethodSpan,
    pub cfg: ControlFlowGraph,
    pub halstead: HalsteadCounts,
    pub metrics: MethodMetrics,
}

pub fn count_loc(span: &MethodSpan) -> u32 {
    span.end_line - span.start_line + 1
}

/// Number of decision points found by scanning tokens alone. Equals
/// v(G) - 1 whenever the method has no unreachable code.
pub fn lexical_decisions(body: &[Token]) -> usize {
    let keywords = body
        .iter()
        .filter(|t| ["if", "while", "for", "case", "catch"].iter().any(|k| t.is_keyword(k)))
        .count();
    let logical = body.iter().filter(|t| t.is("&&") || t.is("||")).count();
    keywords + logical + count_ternaries(body)
}

pub fn analyze_method(file: &str, span: MethodSpan) -> Result<MethodAnalysis, ExtractError> {
    let stmts = parse_body(&span.body)?;
    let cfg = build_cfg(&stmts).map_err(|mut e| {
        if e.line == 0 {
            e.line = span.start_line;
        }
        e
    })?;
    let counts = halstead::count(&span.body);
    let h = counts.measures();
    let metrics = MethodMetrics {
        file: String::from(file),
        method: span.name.clone(),
        start_line: span.start_line,
        loc: count_loc(&span),
        vg: cyclomatic(&cfg) as u32,
        evg: essential(&cfg) as u32,
        ivg: design_complexity(&cfg) as u32,
        hal_n: h.n,
        hal_v: h.v,
        hal_l: h.l,
        hal_d: h.d,
        hal_i: h.i,
        hal_e: h.e,
        hal_b: h.b,
        hal_t: h.t,
    };
    Ok(MethodAnalysis { span, cfg, halstead: counts, metrics })
}

pub fn analyze_source(file: &str, source: &str) -> Result<Vec<MethodAnalysis>, FileError> {
    let wrap = |error| FileError { file: String::from(file), error };
    let tokens = tokenize(source).map_err(wrap)?;
    let mut spans = segment_methods(&tokens).map_err(wrap)?;
    spans.sort_by_key(|s| s.start_line);
    spans.into_iter().map(|s| analyze_method(file, s).map_err(wrap)).collect()
}

/// Extract one [`MethodMetrics`] per method of `source`, ordered by start line.
pub fn extract_source(file: &str, source: &str) -> Result<Vec<MethodMetrics>, FileError> {
    Ok(analyze_source(file, source)?.into_iter().map(|a| a.metrics).collect())
}
