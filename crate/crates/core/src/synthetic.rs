//! Seeded synthetic benchmarks with known structure, for checking that
//! the learners recover it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::boosting::{FeatureMatrix, QueryGroup, QueryRow};
use crate::features::{feature_index, slots, FeatureTable, PairFeatureVector};
use crate::ranking::HistoryGraph;
use crate::stats::{ScoreMatrix, ZERO_SHOT};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `y = 3 x0 - 2 x1 + N(0, noise²)` with `x` uniform on `[0, 1)²`.
pub fn linear_regression(seed: u64, n: usize, noise: f64) -> (FeatureMatrix, Vec<f64>) {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, noise).expect("finite noise level");
    let mut x = FeatureMatrix::new(2);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, b): (f64, f64) = (r.gen(), r.gen());
        x.push_row(&[a, b]).expect("two columns");
        y.push(3.0 * a - 2.0 * b + normal.sample(&mut r));
    }
    (x, y)
}

/// Query groups with uniform features on `[0, 1)` in which the grade is a
/// fixed monotone map of feature `informative`:
/// `min(num_grades - 1, floor(num_grades * x))`. The other features are
/// noise.
pub fn monotone_groups(
    seed: u64,
    groups: usize,
    items: usize,
    features: usize,
    informative: usize,
    num_grades: u32,
) -> Vec<QueryGroup> {
    assert!(informative < features);
    let mut r = rng(seed);
    (0..groups)
        .map(|g| QueryGroup {
            query_id: format!("q{g:02}"),
            rows: (0..items)
                .map(|i| {
                    let features: Vec<f64> = (0..features).map(|_| r.gen()).collect();
                    let x = features[informative];
                    QueryRow {
                        item_id: format!("d{i:02}"),
                        grade: ((f64::from(num_grades) * x).floor() as u32).min(num_grades - 1),
                        raw_score: x,
                        features,
                    }
                })
                .collect(),
        })
        .collect()
}

/// A task whose transfer scores are driven by pair features, plus a
/// history graph unrelated to those scores.
#[derive(Debug, Clone)]
pub struct TransferBenchmark {
    pub languages: Vec<String>,
    pub scores: ScoreMatrix,
    pub features: FeatureTable,
    pub graph: HistoryGraph,
}

/// Score of a cross-lingual pair in [`transfer_benchmark`], before noise.
pub fn transfer_signal(v: &PairFeatureVector) -> f64 {
    let f = |name: &str| v.values[feature_index(name).expect("known feature")];
    0.2 + 0.35 * f("keyword-overlap") + 0.25 * f("name-overlap") + 0.1 * f("type-checking")
        + 0.05 * f("pretrained-source")
}

/// `n` languages, every ordered pair scored. Overlap and equivalence
/// features are symmetric, dataset and pretraining features are per
/// language, and the score is [`transfer_signal`] plus Gaussian noise.
pub fn transfer_benchmark(seed: u64, n: usize, noise: f64) -> TransferBenchmark {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, noise).expect("finite noise level");
    let languages: Vec<String> = (0..n).map(|i| format!("lang{i:02}")).collect();
    let dataset: Vec<[f64; 4]> = (0..n)
        .map(|_| [r.gen_range(800.0..2500.0), r.gen_range(50.0..400.0), r.gen_range(1.0..4.0), r.gen_range(64.0..512.0)])
        .collect();
    let seen: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();

    let mut symmetric = vec![vec![[0.0; 19]; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut block = [1.0; 19];
            if i != j {
                for (k, x) in block.iter_mut().enumerate() {
                    *x = if slots::EQUIVALENCE.contains(&k) { f64::from(u8::from(r.gen_bool(0.5))) } else { r.gen() };
                }
            }
            symmetric[i][j] = block;
            symmetric[j][i] = block;
        }
    }

    let mut scores = ScoreMatrix::new("synthetic");
    let mut rows = Vec::with_capacity(n * n);
    for (i, s) in languages.iter().enumerate() {
        for (j, t) in languages.iter().enumerate() {
            let mut v = PairFeatureVector::new(s.as_str(), t.as_str());
            for (k, &x) in symmetric[i][j].iter().enumerate() {
                v.put(k, Some(x));
            }
            for (k, (xs, xt)) in dataset[i].iter().zip(&dataset[j]).enumerate() {
                let base = slots::DATASET.start + 3 * k;
                v.put(base, Some(*xs));
                v.put(base + 1, Some(*xt));
                v.put(base + 2, Some((xs - xt).abs() / xs.max(*xt)));
            }
            let flags = [seen[i], seen[j], seen[i] && seen[j]];
            for (k, flag) in slots::MODEL.zip(flags) {
                v.put(k, Some(f64::from(u8::from(flag))));
            }
            debug_assert_eq!(v.missing.count(), 0);
            let score = if i == j { 1.0 } else { (transfer_signal(&v) + normal.sample(&mut r)).clamp(0.0, 1.0) };
            scores.insert(s, t, score).expect("fresh cell in range");
            rows.push(v);
        }
        scores.insert(ZERO_SHOT, s, r.gen_range(0.0..0.2)).expect("fresh cell in range");
    }

    let mut graph = HistoryGraph::new();
    let mut order = languages.clone();
    order.shuffle(&mut r);
    for w in order.windows(2) {
        graph.add_edge(&w[0], &w[1]);
    }
    for _ in 0..n / 2 {
        let a = r.gen_range(0..n);
        let b = r.gen_range(0..n);
        graph.add_edge(&languages[a], &languages[b]);
    }

    TransferBenchmark {
        languages,
        scores,
        features: FeatureTable::new(rows).expect("distinct pairs"),
        graph,
    }
}
