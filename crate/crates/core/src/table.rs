//! Comma-separated tables whose exact header row identifies the format
//! version.

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{Error, Result};

/// A parsed data row with its 1-based line number in the source.
pub struct Row {
    pub line: usize,
    pub record: StringRecord,
}

impl Row {
    pub fn get(&self, i: usize) -> &str {
        self.record.get(i).unwrap_or("").trim()
    }
}

/// Reads a table, requiring the header row to equal `header` exactly.
/// Blank lines are skipped.
pub fn read(text: &str, origin: &str, format: &str, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r?,
        None => {
            return Err(Error::FormatVersion {
                path: origin.to_string(),
                expected: format.to_string(),
                found: "<empty file>".to_string(),
            })
        }
    };
    let found: Vec<&str> = first.iter().map(str::trim).collect();
    if found != header {
        return Err(Error::FormatVersion {
            path: origin.to_string(),
            expected: format!("{format} (header `{}`)", header.join(",")),
            found: found.join(","),
        });
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| line_of(text, p.byte() as usize));
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        rows.push(Row { line, record: rec });
    }
    Ok(rows)
}

/// 1-based line of the first non-blank byte at or after `byte`.
fn line_of(text: &str, byte: usize) -> usize {
    let bytes = text.as_bytes();
    let start = bytes[byte..].iter().position(|b| !matches!(b, b'\n' | b'\r')).map_or(bytes.len(), |o| byte + o);
    bytes[..start].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Writes a header row and data rows with `\n` line endings.
pub fn write<I, R, S>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(|s| s.as_ref().to_string()).collect();
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Formats a float so that parsing it back yields the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn parse_f64(s: &str, origin: &str, line: usize, column: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::parse(origin, line, format!("{column}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(origin, line, format!("{column}: `{s}` is not finite")));
    }
    Ok(v)
}

pub fn parse_opt_f64(s: &str, origin: &str, line: usize, column: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, origin, line, column).map(Some)
    }
}
