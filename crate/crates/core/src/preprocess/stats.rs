use serde::{Deserialize, Serialize};

use super::RawTable;

/// Summary of one column, computed over its present values only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub present_count: usize,
    pub missing_count: usize,
    pub negative_count: usize,
}

impl ColumnStats {
    /// No present values; the column carries no information and is dropped by the
    /// pipeline. `mean`, `std`, `min`, and `max` are zero in that case.
    pub fn is_all_missing(&self) -> bool {
        self.present_count == 0
    }

    fn from_values(values: impl Iterator<Item = Option<f64>> + Clone) -> Self {
        let mut present = 0usize;
        let mut missing = 0usize;
        let mut negative = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values.clone() {
            match v {
                Some(x) => {
                    present += 1;
                    sum += x;
                    min = min.min(x);
                    max = max.max(x);
                    if x < 0.0 {
                        negative += 1;
                    }
                }
                None => missing += 1,
            }
        }
        if present == 0 {
            return Self {
                mean: 0.0,
                std: 0.0,
                min: 0.0,
                max: 0.0,
                present_count: 0,
                missing_count: missing,
                negative_count: 0,
            };
        }
        let mean = sum / present as f64;
        let ss: f64 = values.flatten().map(|x| (x - mean) * (x - mean)).sum();
        Self {
            mean,
            std: (ss / present as f64).sqrt(),
            min,
            max,
            present_count: present,
            missing_count: missing,
            negative_count: negative,
        }
    }
}

/// Per-column statistics, each column treated independently.
pub fn compute_column_stats(table: &RawTable) -> Vec<ColumnStats> {
    (0..table.n_cols())
        .map(|c| ColumnStats::from_values(table.column(c)))
        .collect()
}
