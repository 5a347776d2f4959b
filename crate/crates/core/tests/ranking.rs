use std::collections::BTreeMap;

use langxfer::boosting::{Ensemble, Objective, TrainConfig, Tree, TreeNode};
use langxfer::features::{feature_index, feature_names, FeatureTable, PairFeatureVector, NUM_FEATURES};
use langxfer::ranking::{
    dcg_at_k, fold_plan, grade_scores, history_rank, loo_cv, ndcg_at_k, rank_sources, EvalConfig, HistoryGraph,
    Method,
};
use langxfer::stats::ScoreMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// DCG straight from the textbook formula with 1-based positions.
fn oracle_dcg(order: &[usize], grades: &[u32], k: usize) -> f64 {
    order
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &d)| (2f64.powi(grades[d] as i32) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

#[test]
fn ndcg_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=6 {
        let perms = permutations(n);
        for _ in 0..100 {
            let grades: Vec<u32> = (0..n).map(|_| rng.gen_range(0..5)).collect();
            let k = rng.gen_range(1..=n + 1);
            let idcg = perms.iter().map(|p| oracle_dcg(p, &grades, k)).fold(0.0, f64::max);
            let p = &perms[rng.gen_range(0..perms.len())];
            let got = ndcg_at_k(p, &grades, k);
            let want = if idcg == 0.0 { 1.0 } else { oracle_dcg(p, &grades, k) / idcg };
            assert!((got.value - want).abs() <= 1e-12, "{grades:?} {p:?} k={k}");
            assert_eq!(got.degenerate, idcg == 0.0);
        }
    }
}

#[test]
fn ndcg_hand_value() {
    let got = ndcg_at_k(&[2, 1, 0], &[2, 1, 0], 3).value;
    assert!((got - 0.586882).abs() <= 1e-6);
    assert!((dcg_at_k(&[0, 1, 2], 3) - 2.130930).abs() < 1e-6);
}

proptest! {
    #[test]
    fn grading_is_monotone(raw in proptest::collection::vec(0.0f64..1.0, 0..30), g in 2u32..8) {
        let grades = grade_scores(&raw, g).unwrap();
        for i in 0..raw.len() {
            prop_assert!(grades[i] < g);
            for j in 0..raw.len() {
                if raw[i] > raw[j] {
                    prop_assert!(grades[i] >= grades[j]);
                }
                if raw[i] == raw[j] {
                    prop_assert_eq!(grades[i], grades[j]);
                }
            }
        }
    }

    #[test]
    fn ndcg_ignores_equal_grades_beyond_k(grades in proptest::collection::vec(0u32..4, 4..8), k in 1usize..4) {
        let mut order: Vec<usize> = (0..grades.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(grades[i]));
        let base = ndcg_at_k(&order, &grades, k).value;
        prop_assert!((base - 1.0).abs() < 1e-12);
        let mut tail = order.clone();
        tail[k..].reverse();
        // Reversing the tail only moves items beyond k.
        prop_assert!((ndcg_at_k(&tail, &grades, k).value - base).abs() < 1e-12);
    }
}

fn random_graph(rng: &mut ChaCha8Rng) -> (Vec<String>, HistoryGraph, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=20);
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut g = HistoryGraph::new();
    let mut edges = Vec::new();
    for name in &names {
        g.add_edge(name, name);
    }
    let m = rng.gen_range(0..=2 * n);
    for _ in 0..m {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.add_edge(&names[a], &names[b]);
        edges.push((a, b));
    }
    (names, g, edges)
}

#[test]
fn bfs_matches_all_pairs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (names, g, edges) = random_graph(&mut rng);
        let n = names.len();
        // Floyd-Warshall over hop counts.
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(a, b) in &edges {
            if a != b {
                d[a][b] = 1;
                d[b][a] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        for (s, src) in names.iter().enumerate() {
            let bfs = g.distances(src);
            for (t, tgt) in names.iter().enumerate() {
                let want = (d[s][t] < inf).then_some(d[s][t]);
                assert_eq!(bfs.get(tgt.as_str()).copied(), want);
            }
            let ranked = history_rank(&g, src, &names, n);
            for w in ranked.order.windows(2) {
                let key = |x: &(String, Option<usize>)| (x.1.unwrap_or(usize::MAX), x.0.clone());
                assert!(key(&w[0]) <= key(&w[1]));
            }
        }
    }
}

fn pair(source: &str, target: &str, assign: &[(&str, f64)]) -> PairFeatureVector {
    let text: Vec<String> = std::iter::once(format!("{source},{target}"))
        .chain((0..NUM_FEATURES).map(|i| {
            assign
                .iter()
                .find(|(n, _)| feature_index(n) == Some(i))
                .map_or("0".to_string(), |(_, v)| v.to_string())
        }))
        .collect();
    let header: Vec<String> = ["source".to_string(), "target".to_string()].into_iter().chain(feature_names()).collect();
    let csv = format!("{}\n{}\n", header.join(","), text[0].clone() + "," + &text[1..].join(","));
    FeatureTable::parse(&csv, "mem").unwrap().iter().next().unwrap().clone()
}

fn keyword_stump() -> Ensemble {
    let mut m = Ensemble::new(Objective::LambdaRank, TrainConfig::default(), feature_names(), 0.0);
    m.trees.push(Tree {
        nodes: vec![
            TreeNode::Split {
                feature: feature_index("keyword-overlap").unwrap(),
                threshold: 0.5,
                missing_left: true,
                left: 1,
                right: 2,
                cover: 2.0,
            },
            TreeNode::Leaf { value: -1.0, cover: 1.0 },
            TreeNode::Leaf { value: 1.0, cover: 1.0 },
        ],
    });
    m
}

#[test]
fn stump_ranks_by_keyword_overlap() {
    let m = keyword_stump();
    let a = pair("a", "t", &[("keyword-overlap", 0.9)]);
    let b = pair("b", "t", &[("keyword-overlap", 0.1)]);
    let c = pair("c", "t", &[("keyword-overlap", 0.7)]);
    let ranked = rank_sources(&m, "t", &[&b, &a, &c], 3).unwrap();
    let ids: Vec<&str> = ranked.iter().map(|r| r.0.as_str()).collect();
    // a and c share the right leaf, so their tie falls back to id order.
    assert_eq!(ids, ["a", "c", "b"]);
    assert_eq!(rank_sources(&m, "t", &[&b], 3).unwrap()[0].0, "b");
    assert!(rank_sources(&m, "t", &[], 3).unwrap().is_empty());
    assert_eq!(rank_sources(&m, "t", &[&b, &a, &c], 1).unwrap().len(), 1);
    assert!(rank_sources(&m, "u", &[&a], 3).is_err());
}

/// Three targets, six sources; the score is increasing in keyword overlap,
/// which is the same for a source across targets. Every other feature is 0.
fn single_feature_task() -> (ScoreMatrix, FeatureTable) {
    let mut m = ScoreMatrix::new("mono-feature");
    let mut rows = Vec::new();
    for (ti, t) in ["t1", "t2", "t3"].iter().enumerate() {
        for si in 0..6 {
            let s = format!("s{si}");
            let x = 0.1 + 0.15 * si as f64;
            m.insert(&s, t, (x * x * 0.9 + 0.02 * ti as f64).min(1.0)).unwrap();
            rows.push(pair(&s, t, &[("keyword-overlap", x)]));
        }
    }
    (m, FeatureTable::new(rows).unwrap())
}

#[test]
fn loo_recovers_single_feature_ordering() {
    let (m, f) = single_feature_task();
    let report = loo_cv(&m, &f, Method::Ranker, &EvalConfig::default()).unwrap();
    assert_eq!(report.folds.len(), 3);
    assert_eq!(report.mean, 1.0);
    assert_eq!(report.std_dev, 0.0);
    for fold in &report.folds {
        assert_eq!(fold.top, ["s5", "s4", "s3"]);
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("method,target,ndcg,degenerate\nranker,t1,1,false\n"));
    assert!(csv.ends_with("# mean ± std: 1 ± 0\n"));
}

#[test]
fn fold_plan_excludes_the_test_target() {
    let ids: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let plan = fold_plan(&ids[..3], &ids);
    assert_eq!(plan.len(), 3);
    for f in &plan {
        assert!(!f.train.contains(&f.test));
        assert_eq!(f.train.len(), 3);
    }
}

#[test]
fn history_method_follows_bfs_on_chain() {
    let graph = HistoryGraph::parse("format plhist.v1\nedge c cpp\nedge cpp java\nedge java kotlin\n", "mem").unwrap();
    let mut m = ScoreMatrix::new("chain");
    let mut rows = Vec::new();
    let scores: BTreeMap<(&str, &str), f64> = [
        (("java", "kotlin"), 0.9),
        (("cpp", "kotlin"), 0.6),
        (("c", "kotlin"), 0.3),
        (("kotlin", "c"), 0.2),
        (("java", "c"), 0.5),
        (("cpp", "c"), 0.8),
    ]
    .into_iter()
    .collect();
    for (&(s, t), &v) in &scores {
        m.insert(s, t, v).unwrap();
        rows.push(pair(s, t, &[]));
    }
    let f = FeatureTable::new(rows).unwrap();
    let cfg = EvalConfig { graph: Some(graph.clone()), ..EvalConfig::default() };
    let report = loo_cv(&m, &f, Method::History, &cfg).unwrap();
    let kotlin = report.folds.iter().find(|x| x.target == "kotlin").unwrap();
    let bfs: Vec<String> = history_rank(&graph, "kotlin", &["c".into(), "cpp".into(), "java".into()], 3)
        .order
        .into_iter()
        .map(|o| o.0)
        .collect();
    assert_eq!(kotlin.top, bfs);
    assert_eq!(kotlin.ndcg, 1.0);
    let c = report.folds.iter().find(|x| x.target == "c").unwrap();
    assert_eq!(c.top, ["cpp", "java", "kotlin"]);
}

#[test]
fn loo_needs_two_eligible_targets() {
    let mut m = ScoreMatrix::new("tiny");
    m.insert("a", "t", 0.5).unwrap();
    m.insert("b", "t", 0.4).unwrap();
    let f = FeatureTable::new([pair("a", "t", &[]), pair("b", "t", &[])]).unwrap();
    assert!(loo_cv(&m, &f, Method::Regression, &EvalConfig::default()).is_err());
}
