//! Method-level and file-level metric CSVs.

use std::collections::BTreeMap;

use methagg_core::matrix::MetricMatrix;
use methagg_core::metrics::MethodMetrics;

use crate::corpus::normalize_path;
use crate::error::{Error, Result};

pub const METHOD_HEADER: [&str; 15] = [
    "file", "method", "start_line", "loc", "vg", "evg", "ivg", "hal_n", "hal_v", "hal_l", "hal_d", "hal_i", "hal_e",
    "hal_b", "hal_t",
];

/// Optional trailing column of the method CSV carrying the file's defect count.
pub const BUGS_COLUMN: &str = "bugs";

fn num(x: f64) -> String {
    format!("{x}")
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

/// One row per method; with `bugs`, a `bugs` column holds each file's count.
pub fn write_methods(methods: &[MethodMetrics], bugs: Option<&BTreeMap<String, u64>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header: Vec<&str> = METHOD_HEADER.to_vec();
    if bugs.is_some() {
        header.push(BUGS_COLUMN);
    }
    w.write_record(&header).expect("in-memory write");
    for m in methods {
        let mut row = vec![m.file.clone(), m.method.clone()];
        row.extend([m.start_line, m.loc, m.vg, m.evg, m.ivg].map(|v| v.to_string()));
        row.extend([m.hal_n, m.hal_v, m.hal_l, m.hal_d, m.hal_i, m.hal_e, m.hal_b, m.hal_t].map(num));
        if let Some(b) = bugs {
            row.push(b.get(&m.file).copied().unwrap_or(0).to_string());
        }
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub struct MethodTable {
    pub methods: Vec<MethodMetrics>,
    /// Present when the input had a `bugs` column.
    pub bugs: Option<BTreeMap<String, u64>>,
}

fn field<T: std::str::FromStr>(source: &str, line: u64, rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec[i].trim().parse().map_err(|_| Error::parse(source, line, format!("column {} has bad value {:?}", METHOD_HEADER.get(i).unwrap_or(&BUGS_COLUMN), &rec[i])))
}

pub fn read_methods(source: &str, bytes: &[u8]) -> Result<MethodTable> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::parse(source, 1, e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let with_bugs = match cols.len() {
        15 if cols == METHOD_HEADER => false,
        16 if cols[..15] == METHOD_HEADER && cols[15] == BUGS_COLUMN => true,
        _ => return Err(Error::parse(source, 1, format!("expected header `{}[,bugs]`", METHOD_HEADER.join(",")))),
    };
    let mut methods = Vec::new();
    let mut bugs: BTreeMap<String, u64> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(source, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != cols.len() {
            return Err(Error::parse(source, line, format!("expected {} fields, got {}", cols.len(), rec.len())));
        }
        let f = |i| field::<f64>(source, line, &rec, i);
        let u = |i| field::<u32>(source, line, &rec, i);
        let m = MethodMetrics {
            file: normalize_path(&rec[0]),
            method: rec[1].to_string(),
            start_line: u(2)?,
            loc: u(3)?,
            vg: u(4)?,
            evg: u(5)?,
            ivg: u(6)?,
            hal_n: f(7)?,
            hal_v: f(8)?,
            hal_l: f(9)?,
            hal_d: f(10)?,
            hal_i: f(11)?,
            hal_e: f(12)?,
            hal_b: f(13)?,
            hal_t: f(14)?,
        };
        if with_bugs {
            let b: u64 = field(source, line, &rec, 15)?;
            if let Some(prev) = bugs.insert(m.file.clone(), b) {
                if prev != b {
                    return Err(Error::parse(source, line, format!("conflicting bug counts for {}", m.file)));
                }
            }
        }
        methods.push(m);
    }
    Ok(MethodTable { methods, bugs: with_bugs.then_some(bugs) })
}

/// `file` followed by the matrix columns, one row per file.
pub fn write_files(m: &MetricMatrix) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["file".to_string()];
    header.extend(m.columns().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, id) in m.row_ids().iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(m.row(i).iter().map(|&v| num(v)));
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub fn read_files(source: &str, bytes: &[u8]) -> Result<MetricMatrix> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::parse(source, 1, e.to_string()))?.clone();
    if header.get(0) != Some("file") || header.len() < 2 {
        return Err(Error::parse(source, 1, "expected header `file,<columns>`"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(source, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::parse(source, line, format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        let values = rec
            .iter()
            .skip(1)
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::parse(source, line, format!("bad number {v:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((normalize_path(&rec[0]), values));
    }
    MetricMatrix::from_rows(columns, rows).map_err(|e| Error::Run(format!("{source}: {e}")))
}
