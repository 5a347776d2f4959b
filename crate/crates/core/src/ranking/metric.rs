use crate::boosting::{discount, gain};
use crate::error::{Error, Result};

/// Within-query quantile grades. Items are sorted by descending raw score;
/// the item at 1-based position `p` of `n` gets
/// `floor(num_grades * (n - p) / n)`, clipped to `[0, num_grades - 1]`.
/// Tied scores share the grade of their average position.
pub fn grade_scores(raw: &[f64], num_grades: u32) -> Result<Vec<u32>> {
    if num_grades < 2 {
        return Err(Error::invalid("at least two relevance grades are needed"));
    }
    if raw.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("cannot grade NaN scores"));
    }
    let n = raw.len() as f64;
    let positions = crate::stats::average_ranks(raw);
    Ok(positions
        .into_iter()
        .map(|p| {
            let g = (f64::from(num_grades) * (n - p) / n).floor();
            g.clamp(0.0, f64::from(num_grades - 1)) as u32
        })
        .collect())
}

/// DCG of grades listed in presentation order, truncated at `k`.
pub fn dcg_at_k(grades_in_order: &[u32], k: usize) -> f64 {
    grades_in_order.iter().enumerate().map(|(p, &g)| gain(g) * discount(p, k)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ndcg {
    pub value: f64,
    /// All grades are zero; `value` is 1 by convention.
    pub degenerate: bool,
}

/// NDCG@k of `order` (item indices, best first) against `grades`.
pub fn ndcg_at_k(order: &[usize], grades: &[u32], k: usize) -> Ndcg {
    assert!(k >= 1, "k must be at least 1");
    let presented: Vec<u32> = order.iter().map(|&i| grades[i]).collect();
    let mut ideal = grades.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg_at_k(&ideal, k);
    if idcg == 0.0 {
        return Ndcg { value: 1.0, degenerate: true };
    }
    Ndcg { value: dcg_at_k(&presented, k) / idcg, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grading_examples() {
        assert_eq!(grade_scores(&[0.9, 0.8, 0.7, 0.6, 0.5], 5).unwrap(), vec![4, 3, 2, 1, 0]);
        let g = grade_scores(&[0.4, 0.4, 0.4], 5).unwrap();
        assert!(g.iter().all(|&x| x == g[0]));
        let g = grade_scores(&[0.8, 0.8, 0.5], 5).unwrap();
        assert_eq!(g, vec![2, 2, 0]);
        assert!(grade_scores(&[], 5).unwrap().is_empty());
        assert!(grade_scores(&[0.1], 1).is_err());
    }

    #[test]
    fn worst_first_by_hand() {
        let n = ndcg_at_k(&[2, 1, 0], &[2, 1, 0], 3);
        let dcg = 1.0 / 3f64.log2() + 3.0 / 2.0;
        let idcg = 3.0 + 1.0 / 3f64.log2();
        assert!((n.value - dcg / idcg).abs() < 1e-15);
        assert!((n.value - 0.586882).abs() < 1e-6);
    }

    #[test]
    fn ideal_and_degenerate() {
        assert_eq!(ndcg_at_k(&[0, 1, 2], &[3, 1, 0], 3).value, 1.0);
        assert_eq!(ndcg_at_k(&[1, 0], &[0, 0], 3), Ndcg { value: 1.0, degenerate: true });
    }
}
