use crate::boosting::Ensemble;
use crate::error::{Error, Result};
use crate::features::{PairFeatureVector, FEATURE_NAMES};

/// Checks that `model` was trained on the canonical pair features.
pub fn check_feature_order(model: &Ensemble) -> Result<()> {
    if model.feature_names.iter().map(String::as_str).ne(FEATURE_NAMES) {
        return Err(Error::invalid("model feature names do not match the pair feature order"));
    }
    Ok(())
}

/// Scores every candidate source for `target` and returns the best `k`,
/// highest predicted score first, ties by source id.
pub fn rank_sources(
    model: &Ensemble,
    target: &str,
    candidates: &[&PairFeatureVector],
    k: usize,
) -> Result<Vec<(String, f64)>> {
    check_feature_order(model)?;
    let mut scored = Vec::with_capacity(candidates.len());
    for c in candidates {
        if c.target != target {
            return Err(Error::invalid(format!(
                "candidate ({}, {}) does not have target `{target}`",
                c.source, c.target
            )));
        }
        scored.push((c.source.clone(), model.predict(&c.values)?));
    }
    sort_by_score(&mut scored);
    scored.truncate(k);
    Ok(scored)
}

/// Descending score, ties by id.
pub(crate) fn sort_by_score(items: &mut [(String, f64)]) {
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}
