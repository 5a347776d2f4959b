use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::table;

pub const FEATVEC_FORMAT: &str = "featvec.v1";

pub const NUM_FEATURES: usize = 34;

/// Canonical feature order of `featvec.v1`. Frozen; any change is a new
/// format version.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    // linguistic equivalence
    "object-oriented",
    "type-strength",
    "type-checking",
    "type-safety",
    "garbage-collection",
    "standardized",
    "expression-of-types",
    // linguistic overlap
    "paradigm-overlap",
    "type-compatibility-overlap",
    "parameter-passing-overlap",
    // syntactic overlap
    "name-overlap",
    "text-overlap",
    "keyword-overlap",
    "literal-overlap",
    "punctuation-overlap",
    "operator-overlap",
    "comment-overlap",
    "syntax-overlap",
    "tokens-overlap",
    // dataset
    "difficulty-source",
    "difficulty-target",
    "difficulty-rd",
    "length-source",
    "length-target",
    "length-rd",
    "time-limit-source",
    "time-limit-target",
    "time-limit-rd",
    "memory-limit-source",
    "memory-limit-target",
    "memory-limit-rd",
    // model
    "pretrained-source",
    "pretrained-target",
    "pretrained-both",
];

/// Index ranges of the feature groups in [`FEATURE_NAMES`].
pub mod slots {
    use std::ops::Range;

    pub const EQUIVALENCE: Range<usize> = 0..7;
    pub const LINGUISTIC_OVERLAP: Range<usize> = 7..10;
    pub const SYNTACTIC_OVERLAP: Range<usize> = 10..19;
    pub const DATASET: Range<usize> = 19..31;
    pub const MODEL: Range<usize> = 31..34;

    pub const PRETRAINED_SOURCE: usize = 31;
    pub const PRETRAINED_TARGET: usize = 32;
    pub const PRETRAINED_BOTH: usize = 33;

    /// Relative-difference slots inside the dataset block.
    pub fn is_relative_difference(i: usize) -> bool {
        DATASET.contains(&i) && (i - DATASET.start) % 3 == 2
    }
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

pub fn feature_names() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MissingMask(u64);

impl MissingMask {
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < 64);
        self.0 |= 1 << i;
    }

    pub fn clear(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn count(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn bits(&self) -> u64 {
        self.0
    }
}

/// Feature vector for one ordered (source, target) pair. Missing slots
/// hold `NaN` and have their mask bit set.
#[derive(Debug, Clone)]
pub struct PairFeatureVector {
    pub source: String,
    pub target: String,
    pub values: [f64; NUM_FEATURES],
    pub missing: MissingMask,
}

impl PartialEq for PairFeatureVector {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.missing == other.missing
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
    }
}

impl PairFeatureVector {
    /// A vector with every feature missing.
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        PairFeatureVector {
            source: source.into(),
            target: target.into(),
            values: [f64::NAN; NUM_FEATURES],
            missing: MissingMask((1 << NUM_FEATURES) - 1),
        }
    }

    pub(crate) fn put(&mut self, i: usize, value: Option<f64>) {
        match value {
            Some(v) => {
                self.values[i] = v;
                self.missing.clear(i);
            }
            None => {
                self.values[i] = f64::NAN;
                self.missing.set(i);
            }
        }
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        (!self.missing.is_missing(i)).then_some(self.values[i])
    }

    pub fn by_name(&self, name: &str) -> Option<f64> {
        feature_index(name).and_then(|i| self.get(i))
    }
}

/// A set of pair feature vectors keyed by (source, target).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    rows: BTreeMap<(String, String), PairFeatureVector>,
}

impl FeatureTable {
    pub fn new(rows: impl IntoIterator<Item = PairFeatureVector>) -> Result<Self> {
        let mut t = FeatureTable::default();
        for r in rows {
            let key = (r.source.clone(), r.target.clone());
            if t.rows.insert(key, r).is_some() {
                return Err(Error::invalid("duplicate (source, target) pair in feature table"));
            }
        }
        Ok(t)
    }

    pub fn get(&self, source: &str, target: &str) -> Option<&PairFeatureVector> {
        self.rows.get(&(source.to_string(), target.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &PairFeatureVector> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn for_target<'a>(&'a self, target: &'a str) -> impl Iterator<Item = &'a PairFeatureVector> + 'a {
        self.rows.values().filter(move |r| r.target == target)
    }

    /// `featvec.v1`: header `source,target,<feature names>`, one row per
    /// pair, missing cells empty.
    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = ["source", "target"].into_iter().chain(FEATURE_NAMES).collect();
        let rows = self.rows.values().map(|r| {
            let mut cells = vec![r.source.clone(), r.target.clone()];
            cells.extend((0..NUM_FEATURES).map(|i| r.get(i).map(table::fmt_f64).unwrap_or_default()));
            cells
        });
        table::write(&header, rows)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let header: Vec<&str> = ["source", "target"].into_iter().chain(FEATURE_NAMES).collect();
        let rows = table::read(text, origin, FEATVEC_FORMAT, &header)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in &rows {
            let mut v = PairFeatureVector::new(row.get(0), row.get(1));
            for (i, name) in FEATURE_NAMES.iter().enumerate() {
                v.put(i, table::parse_opt_f64(row.get(i + 2), origin, row.line, name)?);
            }
            out.push(v);
        }
        FeatureTable::new(out).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}
