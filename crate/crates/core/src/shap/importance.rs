use super::tree_shap;
use crate::boosting::Ensemble;
use crate::error::{Error, Result};
use crate::table;

pub const SHAPIMP_FORMAT: &str = "shapimp.v1";
const HEADER: [&str; 5] = ["task", "feature", "importance", "normalized", "available"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    pub feature: String,
    /// Mean `|φ|` over the pair set.
    pub importance: f64,
    /// `importance / max importance`, or 0 when every importance is 0.
    pub normalized: f64,
    /// False when the feature is missing on every row of the task.
    pub available: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceTable {
    pub task: String,
    pub features: Vec<FeatureImportance>,
    /// Set when every importance is zero.
    pub all_zero: bool,
}

impl ImportanceTable {
    pub fn get(&self, feature: &str) -> Option<&FeatureImportance> {
        self.features.iter().find(|f| f.feature == feature)
    }

    /// Features by decreasing normalized importance, then name.
    pub fn ranked(&self) -> Vec<&FeatureImportance> {
        let mut v: Vec<_> = self.features.iter().collect();
        v.sort_by(|a, b| b.normalized.total_cmp(&a.normalized).then_with(|| a.feature.cmp(&b.feature)));
        v
    }

    pub fn to_csv(&self) -> String {
        tables_to_csv(std::slice::from_ref(self))
    }
}

/// Writes several tables as one `shapimp.v1` file.
pub fn tables_to_csv(tables: &[ImportanceTable]) -> String {
    let rows = tables.iter().flat_map(|t| {
        t.features.iter().map(move |f| {
            vec![
                t.task.clone(),
                f.feature.clone(),
                table::fmt_f64(f.importance),
                table::fmt_f64(f.normalized),
                f.available.to_string(),
            ]
        })
    });
    table::write(&HEADER, rows)
}

/// Mean absolute TreeSHAP contribution per feature over `rows`, rescaled so
/// the largest is 1.
pub fn aggregate_importance<R: AsRef<[f64]>>(model: &Ensemble, rows: &[R], task: &str) -> Result<ImportanceTable> {
    if rows.is_empty() {
        return Err(Error::invalid(format!("task `{task}`: no pairs to explain")));
    }
    let n = model.num_features();
    let mut sum = vec![0.0; n];
    let mut present = vec![false; n];
    for row in rows {
        let row = row.as_ref();
        let a = tree_shap(model, row)?;
        for i in 0..n {
            sum[i] += a.contributions[i].abs();
            present[i] |= !row[i].is_nan();
        }
    }
    let importance: Vec<f64> = sum.iter().map(|s| s / rows.len() as f64).collect();
    let max = importance.iter().copied().fold(0.0, f64::max);
    let features = model
        .feature_names
        .iter()
        .zip(importance)
        .zip(present)
        .map(|((name, imp), available)| FeatureImportance {
            feature: name.clone(),
            importance: imp,
            normalized: if max > 0.0 { imp / max } else { 0.0 },
            available,
        })
        .collect();
    Ok(ImportanceTable { task: task.to_string(), features, all_zero: max == 0.0 })
}
