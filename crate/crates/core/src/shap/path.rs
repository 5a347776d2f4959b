use crate::boosting::{Tree, TreeNode};

#[derive(Debug, Clone, Copy)]
struct Elem {
    feature: Option<usize>,
    zero: f64,
    one: f64,
    weight: f64,
}

fn extend(path: &mut Vec<Elem>, zero: f64, one: f64, feature: Option<usize>) {
    let l = path.len();
    path.push(Elem { feature, zero, one, weight: if l == 0 { 1.0 } else { 0.0 } });
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / (l + 1) as f64;
        path[i].weight = zero * path[i].weight * (l - i) as f64 / (l + 1) as f64;
    }
}

fn unwind(path: &mut Vec<Elem>, i: usize) {
    let l = path.len() - 1;
    let (one, zero) = (path[i].one, path[i].zero);
    let mut next = path[l].weight;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = path[j].weight;
            path[j].weight = next * (l + 1) as f64 / ((j + 1) as f64 * one);
            next = t - path[j].weight * zero * (l - j) as f64 / (l + 1) as f64;
        } else {
            path[j].weight = path[j].weight * (l + 1) as f64 / (zero * (l - j) as f64);
        }
    }
    for j in i..l {
        path[j].feature = path[j + 1].feature;
        path[j].zero = path[j + 1].zero;
        path[j].one = path[j + 1].one;
    }
    path.pop();
}

/// Total weight of `path` with element `i` removed.
fn unwound_sum(path: &[Elem], i: usize) -> f64 {
    let mut p = path.to_vec();
    unwind(&mut p, i);
    p.iter().map(|e| e.weight).sum()
}

/// TreeSHAP contributions of one tree, in raw leaf units.
pub fn tree_shap_single(tree: &Tree, row: &[f64]) -> Vec<f64> {
    let mut phi = vec![0.0; row.len()];
    if tree.nodes.len() > 1 {
        recurse(tree, row, 0, Vec::new(), 1.0, 1.0, None, &mut phi);
    }
    phi
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    tree: &Tree,
    row: &[f64],
    node: usize,
    mut path: Vec<Elem>,
    zero: f64,
    one: f64,
    feature: Option<usize>,
    phi: &mut [f64],
) {
    extend(&mut path, zero, one, feature);
    match tree.nodes[node] {
        TreeNode::Leaf { value, .. } => {
            for i in 1..path.len() {
                let w = unwound_sum(&path, i);
                let e = path[i];
                phi[e.feature.expect("only the root element lacks a feature")] += w * (e.one - e.zero) * value;
            }
        }
        TreeNode::Split { feature: f, threshold, missing_left, left, right, cover } => {
            let (hot, cold) = if crate::boosting::goes_left(row[f], threshold, missing_left) {
                (left, right)
            } else {
                (right, left)
            };
            let (mut iz, mut io) = (1.0, 1.0);
            if let Some(k) = (1..path.len()).find(|&k| path[k].feature == Some(f)) {
                iz = path[k].zero;
                io = path[k].one;
                unwind(&mut path, k);
            }
            let hot_frac = tree.nodes[hot].cover() / cover;
            let cold_frac = tree.nodes[cold].cover() / cover;
            recurse(tree, row, hot, path.clone(), iz * hot_frac, io, Some(f), phi);
            recurse(tree, row, cold, path, iz * cold_frac, 0.0, Some(f), phi);
        }
    }
}
