use langxfer::boosting::{
    compute_lambdas_for_grades, pairwise_logistic_gradient, pairwise_logistic_hessian, pairwise_logistic_loss,
    train_lambdarank, train_regression, Ensemble, TrainConfig,
};
use langxfer::ranking::ndcg_at_k;
use langxfer::synthetic::{linear_regression, monotone_groups};
use proptest::prelude::*;

#[test]
fn regression_fits_a_noisy_plane() {
    let (x, y) = linear_regression(0, 1000, 0.01);
    let (xt, yt) = linear_regression(1, 500, 0.01);
    let m = train_regression(&x, &y, vec!["a".into(), "b".into()], &TrainConfig::default()).unwrap();
    let n = yt.len() as f64;
    let mse = (0..xt.n_rows()).map(|i| (m.predict(xt.row(i)).unwrap() - yt[i]).powi(2)).sum::<f64>() / n;
    let mean = yt.iter().sum::<f64>() / n;
    let var = yt.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    assert!(mse < 0.01 * var, "mse {mse} var {var}");
    assert_eq!(m.trees.len(), 100);
    assert!(m.trees.iter().all(|t| t.num_leaves() <= 16));
}

#[test]
fn saved_model_reloads_identically() {
    let (x, y) = linear_regression(2, 200, 0.1);
    let cfg = TrainConfig { num_trees: 10, ..TrainConfig::default() };
    let m = train_regression(&x, &y, vec!["a".into(), "b".into()], &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    m.save(&path).unwrap();
    let back = Ensemble::load(&path).unwrap();
    assert_eq!(back, m);
    for i in 0..x.n_rows() {
        assert_eq!(back.predict(x.row(i)).unwrap().to_bits(), m.predict(x.row(i)).unwrap().to_bits());
    }
}

#[test]
fn ranker_orders_held_out_groups() {
    let groups = monotone_groups(3, 25, 10, 5, 2, 5);
    let (train, test) = groups.split_at(20);
    let m = train_lambdarank(train, (0..5).map(|i| format!("f{i}")).collect(), &TrainConfig::default()).unwrap();
    let mean: f64 = test
        .iter()
        .map(|g| {
            let s: Vec<f64> = g.rows.iter().map(|r| m.predict(&r.features).unwrap()).collect();
            let mut order: Vec<usize> = (0..s.len()).collect();
            order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
            ndcg_at_k(&order, &g.grades(), 3).value
        })
        .sum::<f64>()
        / test.len() as f64;
    assert!(mean > 0.9, "{mean}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn derivatives_match_finite_differences(si in -6.0f64..6.0, sj in -6.0f64..6.0, sigma in 0.1f64..3.0) {
        let h = 1e-5;
        let d1 = (pairwise_logistic_loss(si + h, sj, sigma) - pairwise_logistic_loss(si - h, sj, sigma)) / (2.0 * h);
        prop_assert!((d1 - pairwise_logistic_gradient(si, sj, sigma)).abs() < 1e-6);
        let d2 = (pairwise_logistic_gradient(si + h, sj, sigma) - pairwise_logistic_gradient(si - h, sj, sigma)) / (2.0 * h);
        prop_assert!((d2 - pairwise_logistic_hessian(si, sj, sigma)).abs() < 1e-6);
    }

    #[test]
    fn lambdas_sum_to_zero_and_point_uphill(
        grades in proptest::collection::vec(0u32..5, 2..12),
        seed in proptest::collection::vec(-3.0f64..3.0, 12),
    ) {
        let scores = &seed[..grades.len()];
        let (g, h) = compute_lambdas_for_grades(&grades, scores, &TrainConfig::default());
        prop_assert!(g.iter().sum::<f64>().abs() < 1e-12);
        prop_assert!(h.iter().all(|&x| x >= 0.0));
        let top = grades.iter().max().unwrap();
        let bottom = grades.iter().min().unwrap();
        for (i, &gr) in grades.iter().enumerate() {
            // The best items are only ever pushed up, the worst only down.
            if gr == *top {
                prop_assert!(g[i] <= 0.0);
            }
            if gr == *bottom {
                prop_assert!(g[i] >= 0.0);
            }
        }
    }
}
