//! Labelled grids rendered as CSV or aligned text.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// `None` renders as an empty cell (an undefined value).
    Num(Option<f64>),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(Some(v)) => fmt_sig(*v),
            Cell::Num(None) => String::new(),
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => *v,
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RqTable {
    pub caption: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RqTable {
    pub fn new(caption: impl Into<String>, header: Vec<String>) -> Self {
        RqTable { caption: caption.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Look up a numeric cell by the text of the first `key.len()` cells.
    pub fn value(&self, key: &[&str], column: &str) -> Option<f64> {
        let j = self.header.iter().position(|h| h == column)?;
        self.rows
            .iter()
            .find(|r| key.iter().enumerate().all(|(k, s)| matches!(&r[k], Cell::Text(t) if t == s)))
            .and_then(|r| r[j].as_num())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |cells: Vec<String>, out: &mut String| {
            out.push_str(&cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        };
        line(self.header.clone(), &mut out);
        for r in &self.rows {
            line(r.iter().map(Cell::render).collect(), &mut out);
        }
        out
    }

    /// Columns padded to a common width; text left-aligned, numbers right.
    pub fn to_text(&self) -> String {
        let rendered: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| rendered.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        if !self.caption.is_empty() {
            out.push_str(&self.caption);
            out.push('\n');
        }
        let numeric = |j: usize| self.rows.iter().all(|r| matches!(r[j], Cell::Num(_)));
        let emit = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(j, c)| if numeric(j) { format!("{c:>w$}", w = widths[j]) } else { format!("{c:<w$}", w = widths[j]) })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        emit(&self.header, &mut out);
        for r in &rendered {
            emit(r, &mut out);
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Six significant digits, `%g` style: fixed notation for exponents in
/// [-5, 6), scientific otherwise; trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(18.0), "18");
        assert_eq!(fmt_sig(0.123456789), "0.123457");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(123456.7), "123457");
        assert_eq!(fmt_sig(999999.7), "1e6");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333");
    }

    #[test]
    fn render_csv_and_text() {
        let mut t = RqTable::new("cap", vec!["name".into(), "v".into()]);
        t.push(vec![Cell::text("a,b"), Cell::Num(Some(1.25))]);
        t.push(vec![Cell::text("c"), Cell::Num(None)]);
        assert_eq!(t.to_csv(), "name,v\n\"a,b\",1.25\nc,\n");
        assert_eq!(t.to_text(), "cap\nname     v\na,b   1.25\nc\n");
        assert_eq!(t.value(&["a,b"], "v"), Some(1.25));
        assert_eq!(t.value(&["c"], "v"), None);
    }
}
