//! The cleaned, fully numeric dataset shared by every pipeline stage.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::matrix::Matrix;

/// Which feature transform produced a [`CleanDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Continuous,
    Counts,
    Binary,
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Continuous => "continuous",
            Transform::Counts => "counts",
            Transform::Binary => "binary",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: label id {label} is outside 0..{class_count}")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        class_count: usize,
    },
    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: usize },
    #[error("row {row}, column {column}: value {value} violates the {transform} transform")]
    TransformViolation {
        row: usize,
        column: usize,
        value: f64,
        transform: Transform,
    },
}

/// Numeric feature matrix with integer class labels.
///
/// Construction checks every invariant: finite values, labels in range, and the
/// value domain implied by the transform tag (`counts` ⇒ ≥ 0, `binary` ⇒ {0, 1}).
#[derive(Debug, Clone, PartialEq)]
pub struct CleanDataset {
    features: Matrix,
    labels: Vec<usize>,
    class_names: Vec<String>,
    transform: Transform,
    column_names: Vec<String>,
}

impl CleanDataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
        transform: Transform,
        column_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        if labels.len() != features.rows() {
            return Err(DatasetError::ShapeMismatch {
                what: "label count",
                expected: features.rows(),
                found: labels.len(),
            });
        }
        if column_names.len() != features.cols() {
            return Err(DatasetError::ShapeMismatch {
                what: "column name count",
                expected: features.cols(),
                found: column_names.len(),
            });
        }
        let class_count = class_names.len();
        for (row, &label) in labels.iter().enumerate() {
            if label >= class_count {
                return Err(DatasetError::LabelOutOfRange {
                    row,
                    label,
                    class_count,
                });
            }
        }
        for (row, values) in features.iter_rows().enumerate() {
            for (column, &value) in values.iter().enumerate() {
                if !value.is_finite() {
                    return Err(DatasetError::NonFinite { row, column });
                }
                let ok = match transform {
                    Transform::Continuous => true,
                    Transform::Counts => value >= 0.0,
                    Transform::Binary => value == 0.0 || value == 1.0,
                };
                if !ok {
                    return Err(DatasetError::TransformViolation {
                        row,
                        column,
                        value,
                        transform,
                    });
                }
            }
        }
        Ok(Self {
            features,
            labels,
            class_names,
            transform,
            column_names,
        })
    }

    /// Builds a dataset with generated column names `f0, f1, ...`.
    pub fn from_parts(
        features: Matrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
        transform: Transform,
    ) -> Result<Self, DatasetError> {
        let names = (0..features.cols()).map(|i| format!("f{i}")).collect();
        Self::new(features, labels, class_names, transform, names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    /// Rows per class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn select_columns(&self, columns: &[usize]) -> Self {
        Self {
            features: self.features.select_columns(columns),
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            transform: self.transform,
            column_names: columns.iter().map(|&c| self.column_names[c].clone()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            class_names: self.class_names.clone(),
            transform: self.transform,
            column_names: self.column_names.clone(),
        }
    }

    /// Replaces the feature matrix, re-checking the invariants for the new tag.
    pub fn with_features(&self, features: Matrix, transform: Transform) -> Result<Self, DatasetError> {
        Self::new(
            features,
            self.labels.clone(),
            self.class_names.clone(),
            transform,
            self.column_names.clone(),
        )
    }
}
