use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fit_tree, FeatureMatrix, TrainConfig, Tree};
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "gbrank.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Regression,
    #[serde(rename = "lambdarank")]
    LambdaRank,
}

/// A trained boosted-tree model.
///
/// `predict(x) = base_score + learning_rate * Σ tree(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub format: String,
    pub objective: Objective,
    pub config: TrainConfig,
    pub feature_names: Vec<String>,
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

impl Ensemble {
    pub fn new(objective: Objective, config: TrainConfig, feature_names: Vec<String>, base_score: f64) -> Self {
        Ensemble {
            format: MODEL_FORMAT.to_string(),
            objective,
            learning_rate: config.learning_rate,
            config,
            feature_names,
            base_score,
            trees: Vec::new(),
        }
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.num_features() {
            return Err(Error::DimensionMismatch {
                expected: self.num_features(),
                got: row.len(),
            });
        }
        Ok(())
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        self.check_row(row)?;
        Ok(self.predict_unchecked(row, self.trees.len()))
    }

    /// Prediction using only the first `n_trees` trees.
    pub fn predict_staged(&self, row: &[f64], n_trees: usize) -> Result<f64> {
        self.check_row(row)?;
        Ok(self.predict_unchecked(row, n_trees.min(self.trees.len())))
    }

    fn predict_unchecked(&self, row: &[f64], n_trees: usize) -> f64 {
        let sum: f64 = self.trees[..n_trees].iter().map(|t| t.predict(row)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format")
            .and_then(|v| v.as_str())
            .unwrap_or("<none>")
            .to_string();
        if found != MODEL_FORMAT {
            return Err(Error::FormatVersion {
                path: origin.to_string(),
                expected: MODEL_FORMAT.to_string(),
                found,
            });
        }
        let model: Ensemble = serde_json::from_value(value)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    fn validate(&self) -> Result<()> {
        use super::TreeNode;
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return Err(Error::invalid(format!("tree {t} has no nodes")));
            }
            for node in &tree.nodes {
                if let TreeNode::Split {
                    feature,
                    left,
                    right,
                    ..
                } = *node
                {
                    if feature >= self.num_features()
                        || left >= tree.nodes.len()
                        || right >= tree.nodes.len()
                    {
                        return Err(Error::invalid(format!("tree {t} has an out-of-range reference")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Squared-error boosting: start from the target mean and fit each tree to
/// the residual gradients `prediction - target` with unit hessians.
pub fn train_regression(
    features: &FeatureMatrix,
    targets: &[f64],
    feature_names: Vec<String>,
    config: &TrainConfig,
) -> Result<Ensemble> {
    config.validate()?;
    let n = features.n_rows();
    if n == 0 {
        return Err(Error::invalid("regression needs at least one row"));
    }
    if targets.len() != n {
        return Err(Error::invalid(format!(
            "{} targets for {} rows",
            targets.len(),
            n
        )));
    }
    if feature_names.len() != features.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: feature_names.len(),
            got: features.n_cols(),
        });
    }
    if targets.iter().any(|y| y.is_nan()) {
        return Err(Error::invalid("NaN in regression targets"));
    }

    let base = targets.iter().sum::<f64>() / n as f64;
    let mut model = Ensemble::new(Objective::Regression, config.clone(), feature_names, base);
    let mut pred = vec![base; n];
    let hessians = vec![1.0; n];
    let mut gradients = vec![0.0; n];

    for _ in 0..config.num_trees {
        for i in 0..n {
            gradients[i] = pred[i] - targets[i];
        }
        let tree = fit_tree(&gradients, &hessians, features, config);
        for (i, p) in pred.iter_mut().enumerate() {
            *p += config.learning_rate * tree.predict(features.row(i));
        }
        model.trees.push(tree);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::TreeNode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn single_row_predicts_its_target() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let m = train_regression(&x, &[4.25], names(2), &TrainConfig::default()).unwrap();
        assert_eq!(m.predict(&[1.0, 2.0]).unwrap(), 4.25);
    }

    #[test]
    fn nan_target_is_rejected() {
        let x = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(train_regression(&x, &[1.0, f64::NAN], names(1), &TrainConfig::default()).is_err());
    }

    #[test]
    fn constant_targets_give_single_leaf_trees() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let m = train_regression(&x, &[0.7; 10], names(1), &TrainConfig::default()).unwrap();
        assert!(m.trees.iter().all(|t| t.num_leaves() == 1));
        assert!((m.predict(&[3.0]).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn empty_ensemble_predicts_base() {
        let m = Ensemble::new(Objective::Regression, TrainConfig::default(), names(1), 1.5);
        assert_eq!(m.predict(&[0.0]).unwrap(), 1.5);
    }

    #[test]
    fn stump_routes_left() {
        let mut m = Ensemble::new(Objective::Regression, TrainConfig::default(), names(1), 1.0);
        m.trees.push(Tree {
            nodes: vec![
                TreeNode::Split { feature: 0, threshold: 0.5, missing_left: false, left: 1, right: 2, cover: 2.0 },
                TreeNode::Leaf { value: -2.0, cover: 1.0 },
                TreeNode::Leaf { value: 3.0, cover: 1.0 },
            ],
        });
        assert_eq!(m.predict(&[0.1]).unwrap(), 1.0 + 0.1 * -2.0);
        assert_eq!(m.predict(&[f64::NAN]).unwrap(), 1.0 + 0.1 * 3.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = Ensemble::new(Objective::Regression, TrainConfig::default(), names(2), 0.0);
        assert!(matches!(m.predict(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn loading_rejects_other_formats() {
        let m = Ensemble::new(Objective::Regression, TrainConfig::default(), names(1), 0.0);
        let text = m.to_json().unwrap().replace("gbrank.v1", "gbrank.v2");
        assert!(matches!(Ensemble::from_json(&text, "m.json"), Err(Error::FormatVersion { .. })));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let y: Vec<f64> = rows.iter().map(|r| (r[0] * 7.0).sin() + r[1] / 3.0).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let config = TrainConfig { num_trees: 20, ..TrainConfig::default() };
        let m = train_regression(&x, &y, names(2), &config).unwrap();
        let back = Ensemble::from_json(&m.to_json().unwrap(), "mem").unwrap();
        assert_eq!(back, m);
        for _ in 0..100 {
            let r = [rng.gen::<f64>(), rng.gen::<f64>()];
            assert_eq!(back.predict(&r).unwrap().to_bits(), m.predict(&r).unwrap().to_bits());
        }
    }

    #[test]
    fn training_loss_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..150).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0] * r[1] + rng.gen::<f64>() * 0.1).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let config = TrainConfig { num_trees: 30, learning_rate: 0.5, ..TrainConfig::default() };
        let m = train_regression(&x, &y, names(2), &config).unwrap();
        let loss = |k: usize| -> f64 {
            rows.iter()
                .zip(&y)
                .map(|(r, t)| (m.predict_staged(r, k).unwrap() - t).powi(2))
                .sum()
        };
        let mut prev = loss(0);
        for k in 1..=30 {
            let cur = loss(k);
            assert!(cur <= prev + 1e-12, "round {k}: {cur} > {prev}");
            prev = cur;
        }
    }
}
