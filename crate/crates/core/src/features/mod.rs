//! Pairwise features of a (source, target) language pair: linguistic
//! equivalence and overlap, token-vocabulary overlap, dataset statistics
//! and pretraining exposure.

mod dataset;
mod profile;
mod vector;

pub use dataset::{DatasetStats, DatasetTable, DSSTATS_FORMAT};
pub use profile::{
    LanguageProfile, Paradigm, ParameterPassing, ProfileTable, TypeChecking, TypeCompatibility,
    TypeExpression, TypeStrength, LANGPROF_FORMAT,
};
pub use vector::{
    feature_index, feature_names, slots, FeatureTable, MissingMask, PairFeatureVector,
    FEATURE_NAMES, FEATVEC_FORMAT, NUM_FEATURES,
};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lexing::{Category, TokenHistogram};

/// Languages seen during pretraining by default.
pub const DEFAULT_PRETRAINED: [&str; 8] = ["ruby", "javascript", "go", "python", "java", "php", "c", "csharp"];

pub fn default_seen_set() -> BTreeSet<String> {
    DEFAULT_PRETRAINED.iter().map(|s| s.to_string()).collect()
}

/// 1 when both values are present and equal, 0 when they differ, `None`
/// when either is missing.
pub fn equivalence_feature<T: PartialEq>(a: Option<T>, b: Option<T>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if a == b { 1.0 } else { 0.0 }),
        _ => None,
    }
}

/// Jaccard index `|A ∩ B| / |A ∪ B|`, 1 when both are empty.
pub fn set_overlap<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Vocabulary classes compared by [`token_overlap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapCategory {
    Name,
    Text,
    Keyword,
    /// Numbers and strings together.
    Literal,
    Punctuation,
    Operator,
    Comment,
    /// Category-bigram vocabulary.
    Syntax,
    /// Every token string regardless of category.
    Tokens,
}

impl OverlapCategory {
    /// In feature-slot order.
    pub const ALL: [OverlapCategory; 9] = [
        OverlapCategory::Name,
        OverlapCategory::Text,
        OverlapCategory::Keyword,
        OverlapCategory::Literal,
        OverlapCategory::Punctuation,
        OverlapCategory::Operator,
        OverlapCategory::Comment,
        OverlapCategory::Syntax,
        OverlapCategory::Tokens,
    ];

    fn vocabulary(self, h: &TokenHistogram) -> BTreeSet<&str> {
        let single = |c: Category| h.vocabulary(c);
        match self {
            OverlapCategory::Name => single(Category::Name),
            OverlapCategory::Text => single(Category::Text),
            OverlapCategory::Keyword => single(Category::Keyword),
            OverlapCategory::Literal => {
                let mut v = single(Category::LiteralNumber);
                v.extend(single(Category::LiteralString));
                v
            }
            OverlapCategory::Punctuation => single(Category::Punctuation),
            OverlapCategory::Operator => single(Category::Operator),
            OverlapCategory::Comment => single(Category::Comment),
            OverlapCategory::Syntax => h.bigram_vocabulary(),
            OverlapCategory::Tokens => h.all_tokens(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenOverlap {
    pub value: f64,
    /// Raw size of the shared vocabulary.
    pub intersection: usize,
    /// Neither histogram has this category; `value` is 1 by convention.
    pub both_empty: bool,
}

/// Jaccard overlap of two histograms' vocabularies for one category.
/// Counts are ignored.
pub fn token_overlap(hs: &TokenHistogram, ht: &TokenHistogram, category: OverlapCategory) -> TokenOverlap {
    let a = category.vocabulary(hs);
    let b = category.vocabulary(ht);
    let intersection = a.intersection(&b).count();
    TokenOverlap {
        value: set_overlap(&a, &b),
        intersection,
        both_empty: a.is_empty() && b.is_empty(),
    }
}

/// `|xs - xt| / max(xs, xt)`, 0 when both are 0.
pub fn relative_difference(xs: f64, xt: f64) -> f64 {
    let m = xs.max(xt);
    if m == 0.0 {
        0.0
    } else {
        (xs - xt).abs() / m
    }
}

/// Source value, target value and relative difference for each of
/// difficulty, length, time limit and memory limit.
pub fn dataset_features(s: &DatasetStats, t: &DatasetStats) -> [Option<f64>; 12] {
    let mut out = [None; 12];
    for (k, (xs, xt)) in s.values().into_iter().zip(t.values()).enumerate() {
        out[3 * k] = xs;
        out[3 * k + 1] = xt;
        out[3 * k + 2] = match (xs, xt) {
            (Some(a), Some(b)) => Some(relative_difference(a, b)),
            _ => None,
        };
    }
    out
}

/// (source seen, target seen, both seen) as 0/1.
pub fn model_flags(source: &str, target: &str, seen: &BTreeSet<String>) -> [f64; 3] {
    let s = seen.contains(source);
    let t = seen.contains(target);
    [f64::from(u8::from(s)), f64::from(u8::from(t)), f64::from(u8::from(s && t))]
}

/// Inputs shared by every pair assembled from one configuration.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSources<'a> {
    pub profiles: &'a ProfileTable,
    pub histograms: &'a BTreeMap<String, TokenHistogram>,
    pub dataset: Option<&'a DatasetTable>,
    pub seen: &'a BTreeSet<String>,
}

/// Builds the full feature vector for `(source, target)`.
///
/// Absent histograms or dataset statistics, and unknown profile fields,
/// are recorded in the missing mask.
pub fn assemble_pair_features(inputs: &FeatureSources<'_>, source: &str, target: &str) -> Result<PairFeatureVector> {
    let ps = inputs
        .profiles
        .get(source)
        .ok_or_else(|| Error::UnknownLanguage(source.to_string()))?;
    let pt = inputs
        .profiles
        .get(target)
        .ok_or_else(|| Error::UnknownLanguage(target.to_string()))?;

    let mut v = PairFeatureVector::new(source, target);
    let equivalence = [
        equivalence_feature(ps.object_oriented, pt.object_oriented),
        equivalence_feature(ps.type_strength, pt.type_strength),
        equivalence_feature(ps.type_checking, pt.type_checking),
        equivalence_feature(ps.type_safety, pt.type_safety),
        equivalence_feature(ps.garbage_collection, pt.garbage_collection),
        equivalence_feature(ps.standardized, pt.standardized),
        equivalence_feature(ps.expression_of_types, pt.expression_of_types),
    ];
    for (i, x) in slots::EQUIVALENCE.zip(equivalence) {
        v.put(i, x);
    }

    fn overlap<T: Ord>(a: &Option<BTreeSet<T>>, b: &Option<BTreeSet<T>>) -> Option<f64> {
        Some(set_overlap(a.as_ref()?, b.as_ref()?))
    }
    let linguistic = [
        overlap(&ps.paradigms, &pt.paradigms),
        overlap(&ps.type_compatibility, &pt.type_compatibility),
        overlap(&ps.parameter_passing, &pt.parameter_passing),
    ];
    for (i, x) in slots::LINGUISTIC_OVERLAP.zip(linguistic) {
        v.put(i, x);
    }

    let hs = inputs.histograms.get(source);
    let ht = inputs.histograms.get(target);
    for (i, cat) in slots::SYNTACTIC_OVERLAP.zip(OverlapCategory::ALL) {
        let value = match (hs, ht) {
            (Some(a), Some(b)) => Some(token_overlap(a, b, cat).value),
            _ => None,
        };
        v.put(i, value);
    }

    let unknown_s = DatasetStats::missing(source);
    let unknown_t = DatasetStats::missing(target);
    let (ds, dt) = match inputs.dataset {
        Some(table) => (
            table.get(source).unwrap_or(&unknown_s),
            table.get(target).unwrap_or(&unknown_t),
        ),
        None => (&unknown_s, &unknown_t),
    };
    for (i, x) in slots::DATASET.zip(dataset_features(ds, dt)) {
        v.put(i, x);
    }

    for (i, x) in slots::MODEL.zip(model_flags(source, target, inputs.seen)) {
        v.put(i, Some(x));
    }
    Ok(v)
}

/// All ordered pairs (self-pairs included) over `languages`.
pub fn assemble_all_pairs(inputs: &FeatureSources<'_>, languages: &[String]) -> Result<FeatureTable> {
    let mut rows = Vec::with_capacity(languages.len() * languages.len());
    for s in languages {
        for t in languages {
            rows.push(assemble_pair_features(inputs, s, t)?);
        }
    }
    FeatureTable::new(rows)
}
