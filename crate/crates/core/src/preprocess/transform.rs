use serde::{Deserialize, Serialize};

use super::PreprocessError;
use crate::dataset::{CleanDataset, Transform};

fn check_width(expected: usize, data: &CleanDataset) -> Result<(), PreprocessError> {
    if data.n_features() != expected {
        return Err(PreprocessError::DimensionMismatch {
            expected,
            found: data.n_features(),
        });
    }
    Ok(())
}

/// Shifts each feature so that its training minimum maps to zero (only for
/// features whose training minimum is negative), then clamps at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTransform {
    pub shifts: Vec<f64>,
}

impl CountTransform {
    pub fn fit(train: &CleanDataset) -> Self {
        let x = train.features();
        let shifts = (0..x.cols())
            .map(|c| {
                let min = x.column(c).into_iter().fold(f64::INFINITY, f64::min);
                if min < 0.0 {
                    -min
                } else {
                    0.0
                }
            })
            .collect();
        Self { shifts }
    }

    pub fn apply_row(&self, row: &mut [f64]) {
        for (v, s) in row.iter_mut().zip(&self.shifts) {
            *v = (*v + s).max(0.0);
        }
    }

    pub fn apply(&self, data: &CleanDataset) -> Result<CleanDataset, PreprocessError> {
        check_width(self.shifts.len(), data)?;
        let mut m = data.features().clone();
        for r in 0..m.rows() {
            self.apply_row(m.row_mut(r));
        }
        Ok(data.with_features(m, Transform::Counts)?)
    }
}

/// Maps each feature to 1 when strictly above its training median, else 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binarizer {
    pub thresholds: Vec<f64>,
}

impl Binarizer {
    pub fn fit(train: &CleanDataset) -> Self {
        let x = train.features();
        let thresholds = (0..x.cols()).map(|c| median(x.column(c))).collect();
        Self { thresholds }
    }

    pub fn apply_row(&self, row: &mut [f64]) {
        for (v, t) in row.iter_mut().zip(&self.thresholds) {
            *v = if *v > *t { 1.0 } else { 0.0 };
        }
    }

    /// Data already tagged binary passes through unchanged.
    pub fn apply(&self, data: &CleanDataset) -> Result<CleanDataset, PreprocessError> {
        check_width(self.thresholds.len(), data)?;
        if data.transform() == Transform::Binary {
            return Ok(data.clone());
        }
        let mut m = data.features().clone();
        for r in 0..m.rows() {
            self.apply_row(m.row_mut(r));
        }
        Ok(data.with_features(m, Transform::Binary)?)
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
