use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::table;

pub const SCORES_FORMAT: &str = "scores.v1";

/// Reserved source id of the zero-shot column.
pub const ZERO_SHOT: &str = "__zero_shot__";

const HEADER: [&str; 4] = ["task", "source", "target", "score"];

/// Transfer scores of one task over (source, target) pairs. Cells may be
/// absent; the zero-shot column is kept apart from the sources.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    task: String,
    cells: BTreeMap<(String, String), f64>,
    zero_shot: BTreeMap<String, f64>,
    sources: BTreeSet<String>,
    targets: BTreeSet<String>,
}

impl ScoreMatrix {
    pub fn new(task: impl Into<String>) -> Self {
        ScoreMatrix {
            task: task.into(),
            cells: BTreeMap::new(),
            zero_shot: BTreeMap::new(),
            sources: BTreeSet::new(),
            targets: BTreeSet::new(),
        }
    }

    /// Adds one cell; `source == ZERO_SHOT` fills the zero-shot column.
    pub fn insert(&mut self, source: &str, target: &str, score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::invalid(format!("{}: score {score} for ({source}, {target}) outside [0, 1]", self.task)));
        }
        if source.is_empty() || target.is_empty() || target == ZERO_SHOT {
            return Err(Error::invalid(format!("{}: empty or reserved language id", self.task)));
        }
        let fresh = if source == ZERO_SHOT {
            self.zero_shot.insert(target.to_string(), score).is_none()
        } else {
            self.sources.insert(source.to_string());
            self.cells.insert((source.to_string(), target.to_string()), score).is_none()
        };
        if !fresh {
            return Err(Error::invalid(format!("{}: duplicate cell ({source}, {target})", self.task)));
        }
        self.targets.insert(target.to_string());
        Ok(())
    }

    pub fn task(&self) -> &str {
        &self.task
    }

    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        self.cells.get(&(source.to_string(), target.to_string())).copied()
    }

    pub fn zero_shot(&self, target: &str) -> Option<f64> {
        self.zero_shot.get(target).copied()
    }

    pub fn zero_shot_scores(&self) -> impl Iterator<Item = (&str, f64)> {
        self.zero_shot.iter().map(|(t, &v)| (t.as_str(), v))
    }

    /// Source ids in sorted order, without the zero-shot pseudo-source.
    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.sources.iter().map(String::as_str)
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.targets.iter().map(String::as_str)
    }

    pub fn has_source(&self, id: &str) -> bool {
        self.sources.contains(id)
    }

    pub fn has_target(&self, id: &str) -> bool {
        self.targets.contains(id)
    }

    /// A target with no fine-tuning data of its own for this task.
    pub fn is_low_resource(&self, target: &str) -> bool {
        self.has_target(target) && !self.has_source(target)
    }

    /// All (source, target, score) cells, zero-shot excluded.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.cells.iter().map(|((s, t), &v)| (s.as_str(), t.as_str(), v))
    }

    /// Cells with the given target, as (source, score).
    pub fn column(&self, target: &str) -> impl Iterator<Item = (&str, f64)> + '_ {
        let target = target.to_string();
        self.cells
            .iter()
            .filter(move |((_, t), _)| *t == target)
            .map(|((s, _), &v)| (s.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.zero_shot.is_empty()
    }
}

/// Reads every task of a `scores.v1` file, sorted by task id.
pub fn parse_scores(text: &str, origin: &str) -> Result<Vec<ScoreMatrix>> {
    let rows = table::read(text, origin, SCORES_FORMAT, &HEADER)?;
    let mut tasks: BTreeMap<String, ScoreMatrix> = BTreeMap::new();
    for row in &rows {
        let task = row.get(0);
        if task.is_empty() {
            return Err(Error::parse(origin, row.line, "empty task id"));
        }
        let score = table::parse_f64(row.get(3), origin, row.line, "score")?;
        tasks
            .entry(task.to_string())
            .or_insert_with(|| ScoreMatrix::new(task))
            .insert(row.get(1), row.get(2), score)
            .map_err(|e| Error::parse(origin, row.line, e.to_string()))?;
    }
    Ok(tasks.into_values().collect())
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoreMatrix>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text, &path.display().to_string())
}

pub fn write_scores(matrices: &[ScoreMatrix]) -> String {
    let mut rows = Vec::new();
    for m in matrices {
        for (t, v) in m.zero_shot_scores() {
            rows.push(vec![m.task.clone(), ZERO_SHOT.to_string(), t.to_string(), table::fmt_f64(v)]);
        }
        for (s, t, v) in m.cells() {
            rows.push(vec![m.task.clone(), s.to_string(), t.to_string(), table::fmt_f64(v)]);
        }
    }
    table::write(&HEADER, rows)
}
