use crate::error::{Error, Result};

use super::matrix::ScoreMatrix;

/// Which performance vectors are clustered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// One vector per source, over targets.
    Rows,
    /// One vector per target, over sources.
    Columns,
}

pub const LINKAGE: &str = "average";
pub const DISTANCE: &str = "euclidean";

/// One agglomeration step. Node ids below `n` are leaves; merge `k`
/// creates node `n + k`. `left` is the child with the lower height, or
/// on equal heights the one holding the smaller leaf label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
    /// Permutation of label indices, left subtree first.
    pub leaf_order: Vec<usize>,
}

impl Dendrogram {
    pub fn root(&self) -> usize {
        self.labels.len() + self.merges.len() - 1
    }

    pub fn height(&self, node: usize) -> f64 {
        let n = self.labels.len();
        if node < n {
            0.0
        } else {
            self.merges[node - n].height
        }
    }

    pub fn ordered_labels(&self) -> Vec<&str> {
        self.leaf_order.iter().map(|&i| self.labels[i].as_str()).collect()
    }

    /// Nested `(left,right):height` form.
    pub fn to_tree_string(&self) -> String {
        fn go(d: &Dendrogram, node: usize, out: &mut String) {
            let n = d.labels.len();
            if node < n {
                out.push_str(&d.labels[node]);
                return;
            }
            let m = d.merges[node - n];
            out.push('(');
            go(d, m.left, out);
            out.push(',');
            go(d, m.right, out);
            out.push_str(&format!("):{}", m.height));
        }
        let mut s = String::new();
        go(self, self.root(), &mut s);
        s
    }
}

/// Performance vectors along `axis`, labels sorted, missing cells
/// replaced by the mean of the vector's observed cells.
pub fn performance_vectors(m: &ScoreMatrix, axis: Axis) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let sources: Vec<&str> = m.sources().collect();
    let targets: Vec<&str> = m.targets().collect();
    let (labels, dims) = match axis {
        Axis::Rows => (&sources, &targets),
        Axis::Columns => (&targets, &sources),
    };
    let mut vectors = Vec::with_capacity(labels.len());
    for &l in labels {
        let raw: Vec<Option<f64>> = dims
            .iter()
            .map(|&d| match axis {
                Axis::Rows => m.get(l, d),
                Axis::Columns => m.get(d, l),
            })
            .collect();
        let observed: Vec<f64> = raw.iter().flatten().copied().collect();
        if observed.is_empty() {
            return Err(Error::invalid(format!("{}: `{l}` has no observed scores", m.task())));
        }
        let fill = observed.iter().sum::<f64>() / observed.len() as f64;
        vectors.push(raw.into_iter().map(|x| x.unwrap_or(fill)).collect());
    }
    Ok((labels.iter().map(|s| s.to_string()).collect(), vectors))
}

pub fn hierarchical_cluster(m: &ScoreMatrix, axis: Axis) -> Result<Dendrogram> {
    let (labels, vectors) = performance_vectors(m, axis)?;
    cluster_vectors(&labels, &vectors)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Average-linkage agglomeration of labelled vectors. The result does not
/// depend on input order: work happens on label-sorted vectors and
/// equal-distance candidates are resolved by their smallest labels.
pub fn cluster_vectors(labels: &[String], vectors: &[Vec<f64>]) -> Result<Dendrogram> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::invalid("clustering needs at least two vectors"));
    }
    if vectors.len() != n || vectors.iter().any(|v| v.len() != vectors[0].len()) {
        return Err(Error::invalid("vectors must be equally long and match the labels"));
    }
    // Canonical position of each input index.
    let mut canon: Vec<usize> = (0..n).collect();
    canon.sort_by(|&a, &b| labels[a].cmp(&labels[b]).then(a.cmp(&b)));

    let dist: Vec<Vec<f64>> = canon
        .iter()
        .map(|&a| canon.iter().map(|&b| euclidean(&vectors[a], &vectors[b])).collect())
        .collect();

    struct Cluster {
        node: usize,
        members: Vec<usize>,
        height: f64,
    }
    let mut active: Vec<Cluster> = (0..n).map(|i| Cluster { node: i, members: vec![i], height: 0.0 }).collect();
    let linkage = |a: &Cluster, b: &Cluster| {
        let mut s = 0.0;
        for &i in &a.members {
            for &j in &b.members {
                s += dist[i][j];
            }
        }
        s / (a.members.len() * b.members.len()) as f64
    };

    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        // `active` stays sorted by smallest member, so the first minimum
        // found is the one with the smallest labels.
        let mut best = (f64::INFINITY, 0, 1);
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let d = linkage(&active[i], &active[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        let (height, i, j) = best;
        let b = active.remove(j);
        let a = active.remove(i);
        let (left, right) = if b.height < a.height { (b, a) } else { (a, b) };
        let mut members = [left.members.as_slice(), right.members.as_slice()].concat();
        members.sort_unstable();
        // Node ids refer to canonical leaf positions for now.
        merges.push(Merge { left: left.node, right: right.node, height, size: members.len() });
        let merged = Cluster { node: n + merges.len() - 1, members, height };
        let at = active.partition_point(|c| c.members[0] < merged.members[0]);
        active.insert(at, merged);
    }

    let relabel = |node: usize| if node < n { canon[node] } else { node };
    let merges: Vec<Merge> = merges
        .into_iter()
        .map(|m| Merge { left: relabel(m.left), right: relabel(m.right), ..m })
        .collect();
    let mut d = Dendrogram { labels: labels.to_vec(), merges, leaf_order: Vec::with_capacity(n) };
    let mut stack = vec![d.root()];
    while let Some(node) = stack.pop() {
        if node < n {
            d.leaf_order.push(node);
        } else {
            let m = d.merges[node - n];
            stack.push(m.right);
            stack.push(m.left);
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_vectors_merge_at_zero() {
        let d = cluster_vectors(&labels(&["a", "b"]), &[vec![0.3, 0.4], vec![0.3, 0.4]]).unwrap();
        assert_eq!(d.merges[0].height, 0.0);
        assert_eq!(d.to_tree_string(), "(a,b):0");
    }

    #[test]
    fn three_points_by_hand() {
        let d = cluster_vectors(&labels(&["A", "B", "C"]), &[vec![0.0, 0.0], vec![1.0, 0.0], vec![10.0, 0.0]]).unwrap();
        assert_eq!(d.merges[0].height, 1.0);
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
        assert_eq!(d.merges[1].height, 9.5);
        assert_eq!(d.to_tree_string(), "(C,(A,B):1):9.5");
        assert_eq!(d.ordered_labels(), vec!["C", "A", "B"]);
    }

    #[test]
    fn fewer_than_two_vectors_is_an_error() {
        assert!(cluster_vectors(&labels(&["a"]), &[vec![1.0]]).is_err());
    }

    #[test]
    fn missing_cells_are_mean_imputed() {
        let mut m = ScoreMatrix::new("t");
        for (s, t, v) in [("a", "x", 0.2), ("a", "y", 0.4), ("b", "x", 0.6)] {
            m.insert(s, t, v).unwrap();
        }
        let (l, v) = performance_vectors(&m, Axis::Rows).unwrap();
        assert_eq!(l, labels(&["a", "b"]));
        assert_eq!(v, vec![vec![0.2, 0.4], vec![0.6, 0.6]]);
    }
}
