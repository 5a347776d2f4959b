//! Relevance grading, NDCG@k, the three source rankers and their
//! leave-one-target-out evaluation.

mod history;
mod loo;
mod metric;
mod predict;

pub use history::{history_rank, HistoryGraph, HistoryRanking, PLHIST_FORMAT};
pub use loo::{
    build_query_groups, candidates, fold_plan, loo_cv, train_ranker, Candidate, EvalConfig, EvalReport, Fold, FoldResult, Method,
};
pub use metric::{dcg_at_k, grade_scores, ndcg_at_k, Ndcg};
pub use predict::{check_feature_order, rank_sources};
