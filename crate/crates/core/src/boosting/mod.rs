//! Gradient-boosted regression trees with squared-error and LambdaRank
//! objectives.
//!
//! Trees are grown best-first on second-order statistics with exact split
//! search, so every fit is a deterministic function of its inputs. Node
//! covers (training row counts) are kept on every node; the TreeSHAP
//! explainer needs them.

mod lambdarank;
mod matrix;
mod model;
mod tree;

pub use lambdarank::{
    compute_lambdas, compute_lambdas_for_grades, pairwise_logistic_gradient, pairwise_logistic_hessian,
    pairwise_logistic_loss, train_lambdarank, QueryGroup, QueryRow,
};
pub(crate) use lambdarank::{discount, gain};
pub use matrix::FeatureMatrix;
pub use model::{train_regression, Ensemble, Objective, MODEL_FORMAT};
pub(crate) use tree::goes_left;
pub use tree::{fit_tree, Tree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters shared by both objectives.
///
/// Only the tree count and leaf count have externally fixed defaults
/// (100 trees, 16 leaves); the rest are conventional GBDT settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub num_trees: usize,
    pub max_leaves: usize,
    pub learning_rate: f64,
    pub min_samples_per_leaf: usize,
    /// L2 penalty on leaf values (the λ in `-G / (H + λ)`).
    pub l2_leaf_regularization: f64,
    /// Minimum hessian sum allowed in a child.
    pub min_child_weight: f64,
    /// Sharpness of the pairwise logistic in LambdaRank.
    pub sigma: f64,
    /// Truncation level used inside |ΔNDCG|.
    pub ndcg_truncation: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            num_trees: 100,
            max_leaves: 16,
            learning_rate: 0.1,
            min_samples_per_leaf: 1,
            l2_leaf_regularization: 0.0,
            min_child_weight: 1e-3,
            sigma: 1.0,
            ndcg_truncation: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees < 1 {
            return Err(Error::invalid("num_trees must be at least 1"));
        }
        if self.max_leaves < 2 {
            return Err(Error::invalid("max_leaves must be at least 2"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.min_samples_per_leaf < 1 {
            return Err(Error::invalid("min_samples_per_leaf must be at least 1"));
        }
        if !(self.l2_leaf_regularization >= 0.0) || !(self.min_child_weight >= 0.0) {
            return Err(Error::invalid("regularization terms must be non-negative"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        if self.ndcg_truncation < 1 {
            return Err(Error::invalid("ndcg_truncation must be at least 1"));
        }
        Ok(())
    }
}
