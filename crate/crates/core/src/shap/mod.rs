//! Shapley attributions for boosted-tree predictions.
//!
//! The value function is the tree-path conditional expectation: a feature
//! outside the coalition is marginalized by descending both children in
//! proportion to their training cover. [`tree_shap`] computes it exactly in
//! polynomial time; [`brute_force_shap`] enumerates every subset and exists
//! to check it.

mod brute;
mod importance;
mod path;

pub use brute::{brute_force_shap, conditional_expectation, BRUTE_FORCE_MAX_FEATURES};
pub use importance::{aggregate_importance, tables_to_csv, FeatureImportance, ImportanceTable, SHAPIMP_FORMAT};
pub use path::tree_shap_single;

use crate::boosting::{Ensemble, Tree};
use crate::error::{Error, Result};

/// Recorded with every explanation output.
pub const SHAP_VARIANT: &str = "tree-path-dependent";

/// `base_value + Σ contributions == prediction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    pub base_value: f64,
    pub contributions: Vec<f64>,
    pub prediction: f64,
}

impl Attribution {
    /// `|base + Σφ - prediction|`.
    pub fn accuracy_gap(&self) -> f64 {
        (self.base_value + self.contributions.iter().sum::<f64>() - self.prediction).abs()
    }
}

/// Errors unless every node of every split tree carries a positive cover.
/// Single-leaf trees need none.
pub(crate) fn check_covers(model: &Ensemble) -> Result<()> {
    let bad = |t: &Tree| t.nodes.len() > 1 && t.nodes.iter().any(|n| !(n.cover() > 0.0));
    if model.trees.iter().any(bad) {
        return Err(Error::MissingCover);
    }
    Ok(())
}

pub(crate) fn base_value(model: &Ensemble) -> f64 {
    model.base_score + model.learning_rate * model.trees.iter().map(Tree::expected_value).sum::<f64>()
}

/// Exact TreeSHAP attribution of `model` at `row`, summed over trees.
pub fn tree_shap(model: &Ensemble, row: &[f64]) -> Result<Attribution> {
    model.check_row(row)?;
    check_covers(model)?;
    let mut phi = vec![0.0; row.len()];
    for tree in &model.trees {
        for (p, c) in phi.iter_mut().zip(tree_shap_single(tree, row)) {
            *p += model.learning_rate * c;
        }
    }
    Ok(Attribution { base_value: base_value(model), contributions: phi, prediction: model.predict(row)? })
}
