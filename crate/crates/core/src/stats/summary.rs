use crate::error::{Error, Result};
use crate::table;

use super::matrix::ScoreMatrix;

/// Mean scores of one task. A mean over no cells is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub task: String,
    pub mono: Option<f64>,
    pub cross: Option<f64>,
    pub overall: Option<f64>,
    pub zero_shot: Option<f64>,
}

pub(crate) fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn summary_scores(m: &ScoreMatrix) -> Result<SummaryRow> {
    if m.is_empty() {
        return Err(Error::invalid(format!("{}: empty score matrix", m.task())));
    }
    Ok(SummaryRow {
        task: m.task().to_string(),
        mono: mean(m.cells().filter(|(s, t, _)| s == t).map(|c| c.2)),
        cross: mean(m.cells().filter(|(s, t, _)| s != t).map(|c| c.2)),
        overall: mean(m.cells().map(|c| c.2)),
        zero_shot: mean(m.zero_shot_scores().map(|c| c.1)),
    })
}

pub const SUMMARY_HEADER: [&str; 5] = ["task", "mono", "cross", "overall", "zero_shot"];

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let cell = |v: Option<f64>| v.map(table::fmt_f64).unwrap_or_default();
    table::write(
        &SUMMARY_HEADER,
        rows.iter()
            .map(|r| vec![r.task.clone(), cell(r.mono), cell(r.cross), cell(r.overall), cell(r.zero_shot)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_hand() {
        let mut m = ScoreMatrix::new("t");
        m.insert("a", "a", 1.0).unwrap();
        m.insert("b", "b", 1.0).unwrap();
        m.insert("a", "b", 0.5).unwrap();
        m.insert("b", "a", 0.5).unwrap();
        m.insert("__zero_shot__", "a", 0.2).unwrap();
        m.insert("__zero_shot__", "b", 0.4).unwrap();
        let s = summary_scores(&m).unwrap();
        assert_eq!(s.mono, Some(1.0));
        assert_eq!(s.cross, Some(0.5));
        assert_eq!(s.overall, Some(0.75));
        assert!((s.zero_shot.unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn single_mono_cell() {
        let mut m = ScoreMatrix::new("t");
        m.insert("a", "a", 0.7).unwrap();
        let s = summary_scores(&m).unwrap();
        assert_eq!((s.mono, s.overall, s.cross, s.zero_shot), (Some(0.7), Some(0.7), None, None));
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(summary_scores(&ScoreMatrix::new("t")).is_err());
    }
}
