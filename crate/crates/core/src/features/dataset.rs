use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::table;

pub const DSSTATS_FORMAT: &str = "dsstats.v1";

const HEADER: [&str; 5] = ["language", "difficulty", "length", "time_limit", "memory_limit"];

/// Per-language averages over a task dataset. Empty cells are missing.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub language: String,
    pub difficulty: Option<f64>,
    pub length: Option<f64>,
    pub time_limit: Option<f64>,
    pub memory_limit: Option<f64>,
}

impl DatasetStats {
    pub fn missing(language: impl Into<String>) -> Self {
        DatasetStats { language: language.into(), difficulty: None, length: None, time_limit: None, memory_limit: None }
    }

    pub fn values(&self) -> [Option<f64>; 4] {
        [self.difficulty, self.length, self.time_limit, self.memory_limit]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetTable {
    rows: BTreeMap<String, DatasetStats>,
}

impl DatasetTable {
    pub fn new(rows: impl IntoIterator<Item = DatasetStats>) -> Result<Self> {
        let mut t = DatasetTable::default();
        for r in rows {
            if r.values().iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(format!("{}: dataset statistics must be finite and non-negative", r.language)));
            }
            if t.rows.contains_key(&r.language) {
                return Err(Error::invalid(format!("duplicate language id `{}`", r.language)));
            }
            t.rows.insert(r.language.clone(), r);
        }
        Ok(t)
    }

    pub fn get(&self, language: &str) -> Option<&DatasetStats> {
        self.rows.get(language)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DatasetStats> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let rows = table::read(text, origin, DSSTATS_FORMAT, &HEADER)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in &rows {
            let f = |i: usize| table::parse_opt_f64(row.get(i), origin, row.line, HEADER[i]);
            out.push(DatasetStats {
                language: row.get(0).to_string(),
                difficulty: f(1)?,
                length: f(2)?,
                time_limit: f(3)?,
                memory_limit: f(4)?,
            });
        }
        DatasetTable::new(out).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(table::fmt_f64).unwrap_or_default();
        table::write(
            &HEADER,
            self.rows.values().map(|r| {
                let mut cells = vec![r.language.clone()];
                cells.extend(r.values().into_iter().map(cell));
                cells
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_missing_cells() {
        let text = "language,difficulty,length,time_limit,memory_limit\nc,1200,35.5,,256\ngo,1100.25,40,2,\n";
        let t = DatasetTable::parse(text, "mem").unwrap();
        assert_eq!(t.get("c").unwrap().time_limit, None);
        assert_eq!(t.get("go").unwrap().difficulty, Some(1100.25));
        assert_eq!(DatasetTable::parse(&t.to_csv(), "mem").unwrap(), t);
    }

    #[test]
    fn rejects_negative_values() {
        let text = "language,difficulty,length,time_limit,memory_limit\nc,-1,,,\n";
        assert!(DatasetTable::parse(text, "mem").is_err());
    }
}
