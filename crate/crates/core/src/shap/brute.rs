use super::{base_value, check_covers, Attribution};
use crate::boosting::{goes_left, Ensemble, Tree, TreeNode};
use crate::error::{Error, Result};

/// Subset enumeration costs `2^|F|`; larger models are refused.
pub const BRUTE_FORCE_MAX_FEATURES: usize = 12;

fn tree_expectation(tree: &Tree, row: &[f64], known: u32, node: usize) -> f64 {
    match tree.nodes[node] {
        TreeNode::Leaf { value, .. } => value,
        TreeNode::Split { feature, threshold, missing_left, left, right, cover } => {
            if known & (1 << feature) != 0 {
                let next = if goes_left(row[feature], threshold, missing_left) { left } else { right };
                tree_expectation(tree, row, known, next)
            } else {
                (tree.nodes[left].cover() * tree_expectation(tree, row, known, left)
                    + tree.nodes[right].cover() * tree_expectation(tree, row, known, right))
                    / cover
            }
        }
    }
}

/// Model output given only the features in the bit set `known`; the others
/// are marginalized by cover-weighted descent.
pub fn conditional_expectation(model: &Ensemble, row: &[f64], known: u32) -> f64 {
    let sum: f64 = model.trees.iter().map(|t| tree_expectation(t, row, known, 0)).sum();
    model.base_score + model.learning_rate * sum
}

/// Shapley values by direct enumeration over feature subsets.
pub fn brute_force_shap(model: &Ensemble, row: &[f64]) -> Result<Attribution> {
    model.check_row(row)?;
    let n = row.len();
    if n > BRUTE_FORCE_MAX_FEATURES {
        return Err(Error::invalid(format!(
            "brute-force Shapley values support at most {BRUTE_FORCE_MAX_FEATURES} features, model has {n}"
        )));
    }
    check_covers(model)?;

    let value: Vec<f64> = (0..1u32 << n).map(|s| conditional_expectation(model, row, s)).collect();
    let mut fact = vec![1.0f64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut phi = vec![0.0; n];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        for s in (0..1u32 << n).filter(|s| s & bit == 0) {
            let size = s.count_ones() as usize;
            let w = fact[size] * fact[n - size - 1] / fact[n];
            *p += w * (value[(s | bit) as usize] - value[s as usize]);
        }
    }
    Ok(Attribution { base_value: base_value(model), contributions: phi, prediction: model.predict(row)? })
}
