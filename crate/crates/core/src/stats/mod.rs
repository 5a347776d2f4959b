//! Transfer-score analytics: summary means, mean-rank tables, best
//! sources, clustering and heat maps.

mod cluster;
mod heatmap;
mod matrix;
mod rank;
mod summary;

pub use cluster::{cluster_vectors, hierarchical_cluster, performance_vectors, Axis, Dendrogram, Merge, DISTANCE, LINKAGE};
pub use heatmap::render_svg;
pub use matrix::{load_scores, parse_scores, write_scores, ScoreMatrix, SCORES_FORMAT, ZERO_SHOT};
pub use rank::{
    average_ranks, best_source_per_target, best_sources_csv, mean_rank, rank_sources, rank_targets, BestSource,
    RankRow, RankTable, TargetFilter,
};
pub use summary::{summary_csv, summary_scores, SummaryRow, SUMMARY_HEADER};
