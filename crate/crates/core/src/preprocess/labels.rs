use serde::{Deserialize, Serialize};

use super::{PreprocessError, RawTable};
use crate::dataset::{CleanDataset, Transform};
use crate::matrix::Matrix;

/// The six traffic classes of the DoS/Heartbleed flow table, in id order 0..=5.
pub const DOS_CLASS_ORDER: [&str; 6] = [
    "BENIGN",
    "DoS slowloris",
    "DoS Slowhttptest",
    "DoS Hulk",
    "DoS GoldenEye",
    "Heartbleed",
];

/// Ordinal label encoding: class id `i` is `class_names[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    class_names: Vec<String>,
}

impl LabelMap {
    /// With `fixed = None`, ids follow first appearance in `labels`. With a fixed
    /// ordering every label must belong to it.
    pub fn fit(labels: &[String], fixed: Option<&[String]>) -> Result<Self, PreprocessError> {
        match fixed {
            Some(order) => {
                let map = Self {
                    class_names: order.to_vec(),
                };
                map.encode(labels)?;
                Ok(map)
            }
            None => {
                let mut class_names: Vec<String> = Vec::new();
                for l in labels {
                    if !class_names.contains(l) {
                        class_names.push(l.clone());
                    }
                }
                Ok(Self { class_names })
            }
        }
    }

    pub fn from_class_names(class_names: Vec<String>) -> Self {
        Self { class_names }
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == label)
    }

    pub fn encode(&self, labels: &[String]) -> Result<Vec<usize>, PreprocessError> {
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                self.id(l).ok_or_else(|| PreprocessError::UnknownLabel {
                    row: i + 1,
                    label: l.clone(),
                })
            })
            .collect()
    }
}

/// Converts a complete table into a continuous [`CleanDataset`].
pub fn encode_labels(table: &RawTable, fixed: Option<&[String]>) -> Result<CleanDataset, PreprocessError> {
    let map = LabelMap::fit(table.labels(), fixed)?;
    to_dataset(table, &map)
}

pub(crate) fn to_dataset(table: &RawTable, map: &LabelMap) -> Result<CleanDataset, PreprocessError> {
    let labels = map.encode(table.labels())?;
    let mut data = Vec::with_capacity(table.n_rows() * table.n_cols());
    for r in 0..table.n_rows() {
        for (c, v) in table.row(r).iter().enumerate() {
            data.push(v.ok_or(PreprocessError::Incomplete { row: r, column: c })?);
        }
    }
    let features = Matrix::from_vec(table.n_rows(), table.n_cols(), data).expect("rectangular table");
    Ok(CleanDataset::new(
        features,
        labels,
        map.class_names().to_vec(),
        Transform::Continuous,
        table.column_names().to_vec(),
    )?)
}
