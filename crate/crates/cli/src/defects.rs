//! Per-file defect counts (`file,bugs`).

use std::collections::BTreeMap;

use crate::corpus::normalize_path;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectRecord {
    pub file: String,
    pub bugs: u64,
    pub defective: bool,
}

/// Parse a defect CSV. `source` names the input in error messages.
pub fn read_defects(source: &str, bytes: &[u8]) -> Result<Vec<DefectRecord>> {
    let bytes = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::parse(source, 1, e.to_string()))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["file", "bugs"] {
        return Err(Error::parse(source, 1, format!("expected header `file,bugs`, got `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(Error::parse(source, line, format!("expected 2 fields, got {}", rec.len())));
        }
        let file = normalize_path(rec[0].trim());
        if file.is_empty() {
            return Err(Error::parse(source, line, "empty file path"));
        }
        let raw = rec[1].trim();
        let bugs: u64 = match raw.parse::<i64>() {
            Ok(n) if n < 0 => return Err(Error::parse(source, line, format!("negative bug count {n}"))),
            Ok(n) => n as u64,
            Err(_) => return Err(Error::parse(source, line, format!("bug count {raw:?} is not an integer"))),
        };
        if let Some(first) = seen.insert(file.clone(), line) {
            return Err(Error::parse(source, line, format!("duplicate path {file} (first on line {first})")));
        }
        out.push(DefectRecord { defective: bugs > 0, file, bugs });
    }
    Ok(out)
}

pub fn bug_map(records: &[DefectRecord]) -> BTreeMap<String, u64> {
    records.iter().map(|r| (r.file.clone(), r.bugs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<DefectRecord>> {
        read_defects("d.csv", s.as_bytes())
    }

    #[test]
    fn basic_records() {
        let r = parse("file,bugs\na.java,3\n./src\\b.java,0\n").unwrap();
        assert_eq!(r[0], DefectRecord { file: "a.java".into(), bugs: 3, defective: true });
        assert_eq!(r[1], DefectRecord { file: "src/b.java".into(), bugs: 0, defective: false });
    }

    #[test]
    fn crlf_matches_lf() {
        let lf = "file,bugs\na.java,3\nb.java,0\n";
        assert_eq!(parse(lf).unwrap(), parse(&lf.replace('\n', "\r\n")).unwrap());
    }

    fn line_of(e: Error) -> u64 {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse("file,bugs\na.java,1\nb.java,-2\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("file,bugs\na.java,x\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("file,bugs\na.java\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("file,bugs\na.java,1\nb.c,0\n./a.java,2\n").unwrap_err()), 4);
        assert_eq!(line_of(parse("path,count\na,1\n").unwrap_err()), 1);
    }
}
