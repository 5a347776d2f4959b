use std::fmt;
use std::str::FromStr;

use crate::boosting::{train_lambdarank, train_regression, Ensemble, FeatureMatrix, QueryGroup, QueryRow, TrainConfig};
use crate::error::{Error, Result};
use crate::features::{feature_names, FeatureTable, PairFeatureVector};
use crate::stats::ScoreMatrix;
use crate::table;

use super::history::{history_rank, HistoryGraph};
use super::metric::{grade_scores, ndcg_at_k};
use super::predict::sort_by_score;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// LambdaRank ensemble.
    Ranker,
    /// Squared-error ensemble on raw scores.
    Regression,
    /// Shortest path in the history graph.
    History,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ranker, Method::Regression, Method::History];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ranker => "ranker",
            Method::Regression => "regression",
            Method::History => "history",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}` (expected ranker, regression or history)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub k: usize,
    pub num_grades: u32,
    /// Keep source == target rows in the queries.
    pub include_mono: bool,
    pub train: TrainConfig,
    /// History graph for [`Method::History`]; the shipped graph when `None`.
    pub graph: Option<HistoryGraph>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { k: 3, num_grades: 5, include_mono: false, train: TrainConfig::default(), graph: None }
    }
}

/// One candidate source of a query.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub score: f64,
    pub features: &'a PairFeatureVector,
}

impl Candidate<'_> {
    pub fn source(&self) -> &str {
        &self.features.source
    }
}

/// Scored sources of `target` that have a feature vector, sorted by source.
/// The zero-shot column is never a candidate.
pub fn candidates<'a>(
    matrix: &ScoreMatrix,
    features: &'a FeatureTable,
    target: &str,
    include_mono: bool,
    warnings: &mut Vec<String>,
) -> Vec<Candidate<'a>> {
    let mut out = Vec::new();
    for (source, score) in matrix.column(target) {
        if source == target && !include_mono {
            continue;
        }
        match features.get(source, target) {
            Some(f) => out.push(Candidate { score, features: f }),
            None => warnings.push(format!("({source}, {target}): no feature vector; candidate dropped")),
        }
    }
    out
}

/// Graded query groups for the given targets, one per target with any
/// candidates.
pub fn build_query_groups(
    matrix: &ScoreMatrix,
    features: &FeatureTable,
    targets: &[String],
    config: &EvalConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<QueryGroup>> {
    let mut groups = Vec::new();
    for t in targets {
        let cands = candidates(matrix, features, t, config.include_mono, warnings);
        if cands.is_empty() {
            continue;
        }
        let raw: Vec<f64> = cands.iter().map(|c| c.score).collect();
        let grades = grade_scores(&raw, config.num_grades)?;
        let rows = cands
            .iter()
            .zip(grades)
            .map(|(c, grade)| QueryRow {
                item_id: c.source().to_string(),
                features: c.features.values.to_vec(),
                grade,
                raw_score: c.score,
            })
            .collect();
        groups.push(QueryGroup { query_id: t.clone(), rows });
    }
    Ok(groups)
}

/// Test target and the targets its model may train on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub test: String,
    pub train: Vec<String>,
}

/// One fold per eligible target, each training on every other target in
/// `pool`. A fold's training set never contains its test target.
pub fn fold_plan(eligible: &[String], pool: &[String]) -> Vec<Fold> {
    eligible
        .iter()
        .map(|test| {
            let train: Vec<String> = pool.iter().filter(|t| *t != test).cloned().collect();
            assert!(!train.contains(test), "fold for {test} would train on its own query");
            Fold { test: test.clone(), train }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub target: String,
    pub ndcg: f64,
    pub degenerate: bool,
    pub num_candidates: usize,
    /// Predicted top-k sources.
    pub top: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: Method,
    pub k: usize,
    /// Sorted by target id.
    pub folds: Vec<FoldResult>,
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std_dev: f64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    fn from_folds(method: Method, k: usize, mut folds: Vec<FoldResult>, warnings: Vec<String>) -> Self {
        folds.sort_by(|a, b| a.target.cmp(&b.target));
        let n = folds.len() as f64;
        let mean = folds.iter().map(|f| f.ndcg).sum::<f64>() / n;
        let var = folds.iter().map(|f| (f.ndcg - mean).powi(2)).sum::<f64>() / n;
        EvalReport { method, k, folds, mean, std_dev: var.sqrt(), warnings }
    }

    /// `method,target,ndcg,degenerate` rows and a closing `# mean ± std` line.
    pub fn to_csv(&self) -> String {
        let mut s = table::write(
            &["method", "target", "ndcg", "degenerate"],
            self.folds.iter().map(|f| {
                vec![self.method.to_string(), f.target.clone(), table::fmt_f64(f.ndcg), f.degenerate.to_string()]
            }),
        );
        s.push_str(&format!("# mean ± std: {} ± {}\n", table::fmt_f64(self.mean), table::fmt_f64(self.std_dev)));
        s
    }
}

/// Fits a learned ranker on the query groups of `targets`: LambdaRank on
/// graded groups for [`Method::Ranker`], squared error on raw scores for
/// [`Method::Regression`].
pub fn train_ranker(
    matrix: &ScoreMatrix,
    features: &FeatureTable,
    targets: &[String],
    method: Method,
    config: &EvalConfig,
    warnings: &mut Vec<String>,
) -> Result<Ensemble> {
    let groups = build_query_groups(matrix, features, targets, config, warnings)?;
    match method {
        Method::Ranker => train_lambdarank(&groups, feature_names(), &config.train),
        Method::Regression => {
            let rows: Vec<&[f64]> = groups.iter().flat_map(|g| g.rows.iter().map(|r| r.features.as_slice())).collect();
            if rows.is_empty() {
                return Err(Error::invalid(format!("{}: no training pairs", matrix.task())));
            }
            let y: Vec<f64> = groups.iter().flat_map(|g| g.rows.iter().map(|r| r.raw_score)).collect();
            train_regression(&FeatureMatrix::from_rows(&rows)?, &y, feature_names(), &config.train)
        }
        Method::History => Err(Error::invalid("the history ranker has no trainable model")),
    }
}

/// Leave-one-target-out evaluation of `method` on one task.
pub fn loo_cv(matrix: &ScoreMatrix, features: &FeatureTable, method: Method, config: &EvalConfig) -> Result<EvalReport> {
    if config.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut warnings = Vec::new();
    let mut pool = Vec::new();
    let mut eligible = Vec::new();
    for t in matrix.targets() {
        let n = candidates(matrix, features, t, config.include_mono, &mut warnings).len();
        if n > 0 {
            pool.push(t.to_string());
        }
        if n >= 2 {
            eligible.push(t.to_string());
        } else {
            warnings.push(format!("{t}: fewer than two candidate sources; fold skipped"));
        }
    }
    if eligible.len() < 2 {
        return Err(Error::invalid(format!(
            "{}: leave-one-out needs at least two targets with two or more candidates",
            matrix.task()
        )));
    }

    let shipped;
    let graph = match &config.graph {
        Some(g) => g,
        None => {
            shipped = HistoryGraph::shipped();
            &shipped
        }
    };

    let mut folds = Vec::with_capacity(eligible.len());
    for fold in fold_plan(&eligible, &pool) {
        let mut fold_warnings = Vec::new();
        let test = candidates(matrix, features, &fold.test, config.include_mono, &mut fold_warnings);
        let truth: Vec<f64> = test.iter().map(|c| c.score).collect();
        let grades = grade_scores(&truth, config.num_grades)?;

        let order: Vec<usize> = match method {
            Method::History => {
                let ids: Vec<String> = test.iter().map(|c| c.source().to_string()).collect();
                let ranked = history_rank(graph, &fold.test, &ids, ids.len());
                ranked
                    .order
                    .iter()
                    .map(|(s, _)| ids.iter().position(|i| i == s).expect("ranked ids come from candidates"))
                    .collect()
            }
            Method::Ranker | Method::Regression => {
                let model = train_ranker(matrix, features, &fold.train, method, config, &mut fold_warnings)?;
                let mut scored = Vec::with_capacity(test.len());
                for c in &test {
                    scored.push((c.source().to_string(), model.predict(&c.features.values)?));
                }
                sort_by_score(&mut scored);
                scored
                    .iter()
                    .map(|(s, _)| test.iter().position(|c| c.source() == s).expect("scored ids come from candidates"))
                    .collect()
            }
        };
        let n = ndcg_at_k(&order, &grades, config.k);
        folds.push(FoldResult {
            target: fold.test.clone(),
            ndcg: n.value,
            degenerate: n.degenerate,
            num_candidates: test.len(),
            top: order.iter().take(config.k).map(|&i| test[i].source().to_string()).collect(),
        });
        // Candidate warnings repeat across folds; keep each once.
        for w in fold_warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    Ok(EvalReport::from_folds(method, config.k, folds, warnings))
}
