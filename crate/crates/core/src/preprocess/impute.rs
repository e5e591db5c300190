use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::{ColumnStats, RawTable};

/// Which columns may legitimately hold negative values. Every other column is
/// treated as a non-negative magnitude (durations, counts, lengths) and negative
/// values there are clamped to zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClampPolicy {
    pub signed_columns: BTreeSet<String>,
}

impl ClampPolicy {
    pub fn new<I, S>(signed: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            signed_columns: signed.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_non_negative(&self, column: &str) -> bool {
        !self.signed_columns.contains(column)
    }
}

/// Fills absent cells with the column mean from `stats` and clamps negatives in
/// non-negative columns to zero. The fill value is clamped too, so the result is
/// a fixed point: imputing twice equals imputing once.
///
/// Columns whose statistics are all-missing fill with `0.0`; the pipeline drops
/// such columns before getting here.
pub fn impute(table: &RawTable, stats: &[ColumnStats], policy: &ClampPolicy) -> RawTable {
    assert_eq!(stats.len(), table.n_cols(), "one ColumnStats per column");
    let clamp: Vec<bool> = table.column_names().iter().map(|n| policy.is_non_negative(n)).collect();
    let fill: Vec<f64> = stats
        .iter()
        .map(|s| if s.is_all_missing() { 0.0 } else { s.mean })
        .collect();
    let w = table.n_cols();
    let mut out = table.clone();
    for (i, cell) in out.cells_mut().iter_mut().enumerate() {
        let c = i % w;
        let v = cell.unwrap_or(fill[c]);
        *cell = Some(if clamp[c] && v < 0.0 { 0.0 } else { v });
    }
    out
}
