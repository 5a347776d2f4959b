use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, TrainConfig};

/// A node in a tree's flat node array. Children are indices into the same
/// array; the root is index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        missing_left: bool,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

impl TreeNode {
    pub fn cover(&self) -> f64 {
        match *self {
            TreeNode::Split { cover, .. } | TreeNode::Leaf { cover, .. } => cover,
        }
    }
}

/// A single regression tree. Rows go left when `x < threshold`; a missing
/// (`NaN`) value follows `missing_left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf(value: f64, cover: f64) -> Self {
        Tree {
            nodes: vec![TreeNode::Leaf { value, cover }],
        }
    }

    /// Index of the leaf `row` lands in.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut idx = 0;
        loop {
            match self.nodes[idx] {
                TreeNode::Leaf { .. } => return idx,
                TreeNode::Split {
                    feature,
                    threshold,
                    missing_left,
                    left,
                    right,
                    ..
                } => {
                    idx = if goes_left(row[feature], threshold, missing_left) {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            TreeNode::Leaf { value, .. } => value,
            TreeNode::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Cover-weighted mean leaf value.
    pub fn expected_value(&self) -> f64 {
        self.expected_from(0)
    }

    fn expected_from(&self, idx: usize) -> f64 {
        match self.nodes[idx] {
            TreeNode::Leaf { value, .. } => value,
            TreeNode::Split {
                left, right, cover, ..
            } => {
                let lc = self.nodes[left].cover();
                let rc = self.nodes[right].cover();
                if cover <= 0.0 {
                    return 0.5 * (self.expected_from(left) + self.expected_from(right));
                }
                (lc * self.expected_from(left) + rc * self.expected_from(right)) / cover
            }
        }
    }

    pub fn features_used(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Split { feature, .. } => Some(*feature),
            TreeNode::Leaf { .. } => None,
        })
    }
}

#[inline]
pub(crate) fn goes_left(x: f64, threshold: f64, missing_left: bool) -> bool {
    if x.is_nan() {
        missing_left
    } else {
        x < threshold
    }
}

#[derive(Debug, Clone, Copy)]
struct SplitCandidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    missing_left: bool,
}

struct OpenLeaf {
    node: usize,
    rows: Vec<usize>,
    grad: f64,
    hess: f64,
    split: Option<SplitCandidate>,
}

fn leaf_score(g: f64, h: f64, lambda: f64) -> f64 {
    let denom = h + lambda;
    if denom > 0.0 {
        g * g / denom
    } else {
        0.0
    }
}

fn leaf_value(g: f64, h: f64, lambda: f64) -> f64 {
    let denom = h + lambda;
    if denom > 0.0 && g != 0.0 {
        -g / denom
    } else {
        0.0
    }
}

/// Fits one tree to second-order statistics by best-first leaf expansion.
///
/// The leaf with the largest split gain is expanded until `max_leaves` is
/// reached or no split has positive gain. Split search is exact over the
/// sorted distinct values of each feature; equal gains keep the lower
/// feature index, then the lower threshold.
pub fn fit_tree(
    gradients: &[f64],
    hessians: &[f64],
    features: &FeatureMatrix,
    config: &TrainConfig,
) -> Tree {
    assert_eq!(gradients.len(), hessians.len(), "gradients/hessians misaligned");
    assert_eq!(gradients.len(), features.n_rows(), "gradients/features misaligned");

    let lambda = config.l2_leaf_regularization;
    let rows: Vec<usize> = (0..gradients.len()).collect();
    let (g, h) = sums(&rows, gradients, hessians);

    if gradients.iter().all(|&x| x == 0.0) {
        return Tree::leaf(0.0, rows.len() as f64);
    }

    let mut nodes = vec![TreeNode::Leaf {
        value: 0.0,
        cover: rows.len() as f64,
    }];
    let split = best_split(&rows, g, h, gradients, hessians, features, config);
    let mut open = vec![OpenLeaf {
        node: 0,
        rows,
        grad: g,
        hess: h,
        split,
    }];
    let mut n_leaves = 1;

    while n_leaves < config.max_leaves {
        // Largest gain wins; `open` is ordered by creation so the first
        // strictly-better candidate is kept on ties.
        let mut pick: Option<(usize, f64)> = None;
        for (i, leaf) in open.iter().enumerate() {
            if let Some(s) = leaf.split {
                if pick.map_or(true, |(_, best)| s.gain > best) {
                    pick = Some((i, s.gain));
                }
            }
        }
        let Some((i, _)) = pick else { break };
        let leaf = open.remove(i);
        let split = leaf.split.expect("picked leaves carry a split");

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            leaf.rows.iter().partition(|&&r| {
                goes_left(features.get(r, split.feature), split.threshold, split.missing_left)
            });

        let left_idx = nodes.len();
        let right_idx = left_idx + 1;
        nodes[leaf.node] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            missing_left: split.missing_left,
            left: left_idx,
            right: right_idx,
            cover: leaf.rows.len() as f64,
        };
        for (idx, child_rows) in [(left_idx, left_rows), (right_idx, right_rows)] {
            let (cg, ch) = sums(&child_rows, gradients, hessians);
            nodes.push(TreeNode::Leaf {
                value: 0.0,
                cover: child_rows.len() as f64,
            });
            let split = best_split(&child_rows, cg, ch, gradients, hessians, features, config);
            open.push(OpenLeaf {
                node: idx,
                rows: child_rows,
                grad: cg,
                hess: ch,
                split,
            });
        }
        n_leaves += 1;
    }
    for leaf in open {
        nodes[leaf.node] = TreeNode::Leaf {
            value: leaf_value(leaf.grad, leaf.hess, lambda),
            cover: leaf.rows.len() as f64,
        };
    }
    Tree { nodes }
}

fn sums(rows: &[usize], gradients: &[f64], hessians: &[f64]) -> (f64, f64) {
    rows.iter()
        .fold((0.0, 0.0), |(g, h), &r| (g + gradients[r], h + hessians[r]))
}

fn best_split(
    rows: &[usize],
    total_g: f64,
    total_h: f64,
    gradients: &[f64],
    hessians: &[f64],
    features: &FeatureMatrix,
    config: &TrainConfig,
) -> Option<SplitCandidate> {
    let min_leaf = config.min_samples_per_leaf.max(1);
    if rows.len() < 2 * min_leaf {
        return None;
    }
    let lambda = config.l2_leaf_regularization;
    let parent = leaf_score(total_g, total_h, lambda);
    let mut best: Option<SplitCandidate> = None;

    let mut present: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
    for feature in 0..features.n_cols() {
        present.clear();
        let (mut miss_g, mut miss_h, mut miss_n) = (0.0, 0.0, 0usize);
        for &r in rows {
            let x = features.get(r, feature);
            if x.is_nan() {
                miss_g += gradients[r];
                miss_h += hessians[r];
                miss_n += 1;
            } else {
                present.push((x, gradients[r], hessians[r]));
            }
        }
        if present.len() < 2 {
            continue;
        }
        present.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n_present = present.len();
        let (pres_g, pres_h) = present
            .iter()
            .fold((0.0, 0.0), |(g, h), &(_, gi, hi)| (g + gi, h + hi));

        let (mut lg, mut lh) = (0.0, 0.0);
        for i in 0..n_present - 1 {
            lg += present[i].1;
            lh += present[i].2;
            let (lo, hi) = (present[i].0, present[i + 1].0);
            if lo == hi {
                continue;
            }
            let ln = i + 1;
            let rn = n_present - ln;
            // Missing rows follow the side holding more training rows.
            let missing_left = ln >= rn;
            let (gl, hl, nl, gr, hr, nr) = if missing_left {
                (lg + miss_g, lh + miss_h, ln + miss_n, pres_g - lg, pres_h - lh, rn)
            } else {
                (lg, lh, ln, pres_g - lg + miss_g, pres_h - lh + miss_h, rn + miss_n)
            };
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            if hl < config.min_child_weight || hr < config.min_child_weight {
                continue;
            }
            let children = leaf_score(gl, hl, lambda) + leaf_score(gr, hr, lambda);
            let gain = 0.5 * (children - parent);
            // Ignore gains that are rounding noise relative to the scores involved.
            if !(gain > 1e-10 * children.abs()) {
                continue;
            }
            if best.map_or(true, |b| gain > b.gain) {
                best = Some(SplitCandidate {
                    gain,
                    feature,
                    threshold: midpoint(lo, hi),
                    missing_left,
                });
            }
        }
    }
    best
}

/// Threshold strictly above `lo` and at most `hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(max_leaves: usize) -> TrainConfig {
        TrainConfig {
            max_leaves,
            ..TrainConfig::default()
        }
    }

    fn matrix(rows: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn zero_gradients_give_single_zero_leaf() {
        let x = matrix(&[&[1.0], &[2.0], &[3.0]]);
        let tree = fit_tree(&[0.0; 3], &[1.0; 3], &x, &cfg(16));
        assert_eq!(tree, Tree::leaf(0.0, 3.0));
    }

    #[test]
    fn constant_residuals_do_not_split() {
        let x = matrix(&[&[1.0], &[2.0], &[3.0], &[4.0]]);
        let g = [0.1 * 3.0 / 3.0 - 0.1; 4];
        let tree = fit_tree(&g, &[1.0; 4], &x, &cfg(16));
        assert_eq!(tree.num_leaves(), 1);
    }

    #[test]
    fn step_function_splits_at_midpoint() {
        // Residuals of a step at 0.5 around the mean 0.5: g = pred - y.
        let xs = [0.1, 0.3, 0.4, 0.7, 0.9];
        let ys = [0.0, 0.0, 0.0, 1.0, 1.0];
        let base = ys.iter().sum::<f64>() / ys.len() as f64;
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g: Vec<f64> = ys.iter().map(|y| base - y).collect();
        let tree = fit_tree(&g, &[1.0; 5], &x, &cfg(2));
        match tree.nodes[0] {
            TreeNode::Split { feature, threshold, left, right, .. } => {
                assert_eq!(feature, 0);
                assert!((threshold - 0.55).abs() < 1e-15);
                // Leaf = -G/H = mean residual target on each side.
                match tree.nodes[left] {
                    TreeNode::Leaf { value, cover } => {
                        assert!((value + 0.4).abs() < 1e-15);
                        assert_eq!(cover, 3.0);
                    }
                    _ => panic!("left child should be a leaf"),
                }
                match tree.nodes[right] {
                    TreeNode::Leaf { value, cover } => {
                        assert!((value - 0.6).abs() < 1e-15);
                        assert_eq!(cover, 2.0);
                    }
                    _ => panic!("right child should be a leaf"),
                }
            }
            _ => panic!("expected a root split"),
        }
    }

    #[test]
    fn informative_feature_wins_root() {
        // Feature 1 alternates independently of the target.
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![i as f64, (i % 2) as f64])
            .collect();
        let y: Vec<f64> = (0..8).map(|i| if i < 4 { 0.0 } else { 1.0 }).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g: Vec<f64> = y.iter().map(|y| 0.5 - y).collect();
        let tree = fit_tree(&g, &[1.0; 8], &x, &cfg(2));
        assert!(matches!(tree.nodes[0], TreeNode::Split { feature: 0, .. }));
    }

    #[test]
    fn equal_gain_prefers_lower_feature() {
        // Two identical columns.
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, i as f64]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g = [1.0, 1.0, -1.0, -1.0];
        let tree = fit_tree(&g, &[1.0; 4], &x, &cfg(2));
        assert!(matches!(tree.nodes[0], TreeNode::Split { feature: 0, threshold, .. } if threshold == 1.5));
    }

    #[test]
    fn respects_leaf_bound() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g: Vec<f64> = (0..64).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        for leaves in [2, 3, 5, 16] {
            let tree = fit_tree(&g, &[1.0; 64], &x, &cfg(leaves));
            assert!(tree.num_leaves() <= leaves);
            assert_eq!(tree.num_leaves(), leaves);
        }
    }

    #[test]
    fn missing_values_follow_majority_side() {
        let rows: Vec<Vec<f64>> = vec![
            vec![0.0],
            vec![1.0],
            vec![2.0],
            vec![10.0],
            vec![f64::NAN],
        ];
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g = [-1.0, -1.0, -1.0, 3.0, 0.0];
        let tree = fit_tree(&g, &[1.0; 5], &x, &cfg(2));
        match tree.nodes[0] {
            TreeNode::Split { missing_left, left, .. } => {
                assert!(missing_left);
                assert_eq!(tree.nodes[left].cover(), 4.0);
            }
            _ => panic!("expected split"),
        }
        assert_eq!(tree.leaf_index(&[f64::NAN]), tree.leaf_index(&[0.0]));
    }

    #[test]
    fn min_samples_per_leaf_is_enforced() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let g = [5.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let config = TrainConfig {
            max_leaves: 2,
            min_samples_per_leaf: 3,
            ..TrainConfig::default()
        };
        let tree = fit_tree(&g, &[1.0; 6], &x, &config);
        if let TreeNode::Split { left, right, .. } = tree.nodes[0] {
            assert!(tree.nodes[left].cover() >= 3.0 && tree.nodes[right].cover() >= 3.0);
        }
    }
}
