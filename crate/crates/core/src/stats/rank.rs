use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::table;

use super::matrix::ScoreMatrix;
use super::summary::mean;

/// 1-based ranks by descending score; tied scores share the average of
/// their positions.
pub fn average_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Arithmetic mean of per-task ranks.
pub fn mean_rank(ranks: &[f64]) -> f64 {
    assert!(!ranks.is_empty(), "mean_rank needs at least one task");
    ranks.iter().sum::<f64>() / ranks.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub language: String,
    /// One entry per task, in [`RankTable::tasks`] order.
    pub scores: Vec<f64>,
    pub zero_shot: Vec<Option<f64>>,
    pub ranks: Vec<f64>,
    pub mean_rank: f64,
}

/// Languages sorted ascending by mean rank, ties by id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub tasks: Vec<String>,
    pub rows: Vec<RankRow>,
    pub warnings: Vec<String>,
}

impl RankTable {
    pub fn get(&self, language: &str) -> Option<&RankRow> {
        self.rows.iter().find(|r| r.language == language)
    }

    /// Long format: one line per (language, task).
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        for r in &self.rows {
            for (k, task) in self.tasks.iter().enumerate() {
                rows.push(vec![
                    r.language.clone(),
                    task.clone(),
                    table::fmt_f64(r.scores[k]),
                    r.zero_shot[k].map(table::fmt_f64).unwrap_or_default(),
                    table::fmt_f64(r.ranks[k]),
                    table::fmt_f64(r.mean_rank),
                ]);
            }
        }
        table::write(&["language", "task", "score", "zero_shot", "rank", "mean_rank"], rows)
    }
}

/// Which targets a source's score averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetFilter {
    All,
    /// Only targets that are not sources in the same task.
    LowResourceOnly,
}

fn common<'a>(matrices: &'a [ScoreMatrix], ids: impl Fn(&'a ScoreMatrix) -> Vec<&'a str>) -> BTreeSet<String> {
    let mut sets = matrices.iter().map(|m| ids(m).into_iter().map(str::to_string).collect::<BTreeSet<_>>());
    let first = sets.next().unwrap_or_default();
    sets.fold(first, |acc, s| acc.intersection(&s).cloned().collect())
}

fn build(
    matrices: &[ScoreMatrix],
    items: BTreeSet<String>,
    mut warnings: Vec<String>,
    score: impl Fn(&ScoreMatrix, &str) -> Option<f64>,
    zero_shot: impl Fn(&ScoreMatrix, &str) -> Option<f64>,
) -> Result<RankTable> {
    let mut kept = Vec::new();
    'item: for item in items {
        let mut scores = Vec::with_capacity(matrices.len());
        for m in matrices {
            match score(m, &item) {
                Some(s) => scores.push(s),
                None => {
                    warnings.push(format!("{item}: no scores in task {}; excluded", m.task()));
                    continue 'item;
                }
            }
        }
        let zs = matrices.iter().map(|m| zero_shot(m, &item)).collect();
        kept.push((item, scores, zs));
    }
    if kept.is_empty() {
        return Err(Error::invalid("no language has scores in every task"));
    }
    let mut ranks = vec![Vec::with_capacity(matrices.len()); kept.len()];
    for k in 0..matrices.len() {
        let column: Vec<f64> = kept.iter().map(|r| r.1[k]).collect();
        for (i, r) in average_ranks(&column).into_iter().enumerate() {
            ranks[i].push(r);
        }
    }
    let mut rows: Vec<RankRow> = kept
        .into_iter()
        .zip(ranks)
        .map(|((language, scores, zero_shot), ranks)| RankRow {
            language,
            mean_rank: mean_rank(&ranks),
            scores,
            zero_shot,
            ranks,
        })
        .collect();
    rows.sort_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank).then_with(|| a.language.cmp(&b.language)));
    Ok(RankTable { tasks: matrices.iter().map(|m| m.task().to_string()).collect(), rows, warnings })
}

fn requested(
    matrices: &[ScoreMatrix],
    subset: Option<&[String]>,
    present: impl Fn(&ScoreMatrix, &str) -> bool,
    all: BTreeSet<String>,
) -> (BTreeSet<String>, Vec<String>) {
    let Some(subset) = subset else { return (all, Vec::new()) };
    let mut warnings = Vec::new();
    let mut items = BTreeSet::new();
    for id in subset {
        match matrices.iter().find(|m| !present(m, id)) {
            Some(m) => warnings.push(format!("{id}: absent from task {}; excluded", m.task())),
            None => {
                items.insert(id.clone());
            }
        }
    }
    (items, warnings)
}

/// Ranks targets by their mean cross-lingual score (every source except
/// the target itself) in each task, then by mean rank across tasks.
pub fn rank_targets(matrices: &[ScoreMatrix], subset: Option<&[String]>) -> Result<RankTable> {
    if matrices.is_empty() {
        return Err(Error::invalid("no score matrices"));
    }
    let all = common(matrices, |m| m.targets().collect());
    let (items, warnings) = requested(matrices, subset, ScoreMatrix::has_target, all);
    build(
        matrices,
        items,
        warnings,
        |m, t| mean(m.column(t).filter(|(s, _)| *s != t).map(|c| c.1)),
        |m, t| m.zero_shot(t),
    )
}

/// Ranks sources by their mean score over the included targets (the
/// source itself excluded) in each task, then by mean rank across tasks.
pub fn rank_sources(matrices: &[ScoreMatrix], subset: Option<&[String]>, filter: TargetFilter) -> Result<RankTable> {
    if matrices.is_empty() {
        return Err(Error::invalid("no score matrices"));
    }
    for m in matrices {
        if filter == TargetFilter::LowResourceOnly && !m.targets().any(|t| m.is_low_resource(t)) {
            return Err(Error::invalid(format!("{}: no low-resource targets", m.task())));
        }
    }
    let all = common(matrices, |m| m.sources().collect());
    let (items, warnings) = requested(matrices, subset, ScoreMatrix::has_source, all);
    build(
        matrices,
        items,
        warnings,
        |m, s| {
            mean(
                m.targets()
                    .filter(|&t| t != s && (filter == TargetFilter::All || m.is_low_resource(t)))
                    .filter_map(|t| m.get(s, t)),
            )
        },
        |_, _| None,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSource {
    pub target: String,
    pub source: String,
    pub score: f64,
    /// Other sources reaching the same score.
    pub tied_with: Vec<String>,
}

impl BestSource {
    pub fn is_tie(&self) -> bool {
        !self.tied_with.is_empty()
    }
}

/// The highest-scoring other source for every target; ties go to the
/// lexicographically first source and are recorded.
pub fn best_source_per_target(m: &ScoreMatrix) -> Vec<BestSource> {
    let mut out = Vec::new();
    for target in m.targets() {
        let candidates: Vec<(&str, f64)> = m.column(target).filter(|(s, _)| *s != target).collect();
        let Some(best) = candidates.iter().map(|c| c.1).max_by(f64::total_cmp) else { continue };
        let mut winners = candidates.iter().filter(|c| c.1 == best).map(|c| c.0.to_string());
        let source = winners.next().expect("maximum is attained");
        out.push(BestSource { target: target.to_string(), source, score: best, tied_with: winners.collect() });
    }
    out
}

pub fn best_sources_csv(task: &str, rows: &[BestSource]) -> String {
    table::write(
        &["task", "target", "source", "score", "tied_with"],
        rows.iter().map(|r| {
            vec![task.to_string(), r.target.clone(), r.source.clone(), table::fmt_f64(r.score), r.tied_with.join(";")]
        }),
    )
}
