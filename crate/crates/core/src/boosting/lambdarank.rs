use serde::{Deserialize, Serialize};

use super::{fit_tree, Ensemble, FeatureMatrix, Objective, TrainConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRow {
    /// Identifies the ranked item (a source language).
    pub item_id: String,
    pub features: Vec<f64>,
    pub grade: u32,
    pub raw_score: f64,
}

/// All candidate rows for one query (a target language).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryGroup {
    pub query_id: String,
    pub rows: Vec<QueryRow>,
}

impl QueryGroup {
    pub fn grades(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.grade).collect()
    }

    /// True when the group has at least two rows and two distinct grades.
    pub fn has_signal(&self) -> bool {
        self.rows.len() >= 2 && self.rows.iter().any(|r| r.grade != self.rows[0].grade)
    }
}

#[inline]
pub(crate) fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

/// DCG discount of a 0-based position, zero at or beyond `truncation`.
#[inline]
pub(crate) fn discount(position: usize, truncation: usize) -> f64 {
    if position < truncation {
        1.0 / ((position + 2) as f64).log2()
    } else {
        0.0
    }
}

/// `ρ = 1 / (1 + exp(σ (s_i - s_j)))`.
fn rho(si: f64, sj: f64, sigma: f64) -> f64 {
    1.0 / (1.0 + (sigma * (si - sj)).exp())
}

/// Logistic loss `log(1 + exp(-σ (s_i - s_j)))` of a pair in which `i`
/// should rank above `j`.
pub fn pairwise_logistic_loss(si: f64, sj: f64, sigma: f64) -> f64 {
    let z = -sigma * (si - sj);
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Derivative of [`pairwise_logistic_loss`] with respect to `s_i`: `-σ ρ`.
pub fn pairwise_logistic_gradient(si: f64, sj: f64, sigma: f64) -> f64 {
    -sigma * rho(si, sj, sigma)
}

/// Second derivative with respect to `s_i`: `σ² ρ (1 - ρ)`.
pub fn pairwise_logistic_hessian(si: f64, sj: f64, sigma: f64) -> f64 {
    let r = rho(si, sj, sigma);
    sigma * sigma * r * (1.0 - r)
}

/// Pairwise LambdaRank gradients and hessians for one group.
pub fn compute_lambdas(group: &QueryGroup, scores: &[f64], config: &TrainConfig) -> (Vec<f64>, Vec<f64>) {
    compute_lambdas_for_grades(&group.grades(), scores, config)
}

/// LambdaRank gradients for a list of grades under the current `scores`.
///
/// For every pair with `grade_i > grade_j`,
/// `ρ = 1 / (1 + exp(σ (s_i - s_j)))` and `λ = -σ ρ |ΔNDCG@k|` is added
/// to `i` and subtracted from `j`; both receive the hessian weight
/// `σ² ρ (1 - ρ) |ΔNDCG@k|`. The current order breaks score ties by index.
pub fn compute_lambdas_for_grades(grades: &[u32], scores: &[f64], config: &TrainConfig) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(grades.len(), scores.len(), "grades/scores misaligned");
    let n = grades.len();
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    if n < 2 || grades.iter().all(|&g| g == grades[0]) {
        return (grad, hess);
    }

    let k = config.ndcg_truncation;
    let sigma = config.sigma;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut position = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }

    let mut ideal: Vec<u32> = grades.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .enumerate()
        .map(|(p, &g)| gain(g) * discount(p, k))
        .sum();
    if idcg <= 0.0 {
        return (grad, hess);
    }

    for i in 0..n {
        for j in 0..n {
            if grades[i] <= grades[j] {
                continue;
            }
            let delta = ((gain(grades[i]) - gain(grades[j]))
                * (discount(position[i], k) - discount(position[j], k)))
            .abs()
                / idcg;
            if delta == 0.0 {
                continue;
            }
            let lambda = pairwise_logistic_gradient(scores[i], scores[j], sigma) * delta;
            grad[i] += lambda;
            grad[j] -= lambda;
            let w = pairwise_logistic_hessian(scores[i], scores[j], sigma) * delta;
            hess[i] += w;
            hess[j] += w;
        }
    }
    (grad, hess)
}

/// Boosts a ranker on query groups. Starts from score 0; every round
/// recomputes lambdas per group from the current scores and fits one tree.
pub fn train_lambdarank(groups: &[QueryGroup], feature_names: Vec<String>, config: &TrainConfig) -> Result<Ensemble> {
    config.validate()?;
    if !groups.iter().any(QueryGroup::has_signal) {
        return Err(Error::NoRankingSignal);
    }

    let mut features = FeatureMatrix::new(feature_names.len());
    let mut spans = Vec::with_capacity(groups.len());
    for group in groups {
        let start = features.n_rows();
        for row in &group.rows {
            features.push_row(&row.features)?;
        }
        spans.push((start, features.n_rows()));
    }

    let n = features.n_rows();
    let mut model = Ensemble::new(Objective::LambdaRank, config.clone(), feature_names, 0.0);
    let mut scores = vec![0.0; n];
    let mut gradients = vec![0.0; n];
    let mut hessians = vec![0.0; n];

    for _ in 0..config.num_trees {
        for (group, &(start, end)) in groups.iter().zip(&spans) {
            let (g, h) = compute_lambdas(group, &scores[start..end], config);
            gradients[start..end].copy_from_slice(&g);
            hessians[start..end].copy_from_slice(&h);
        }
        let tree = fit_tree(&gradients, &hessians, &features, config);
        for (i, s) in scores.iter_mut().enumerate() {
            *s += config.learning_rate * tree.predict(features.row(i));
        }
        model.trees.push(tree);
    }
    Ok(model)
}
