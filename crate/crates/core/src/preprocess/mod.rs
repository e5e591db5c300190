//! Flow-table ingestion and cleaning: CSV loading, per-column statistics,
//! mean imputation, label encoding, the count and binary feature transforms,
//! and the seeded train/test split.
//!
//! Every fitted quantity (imputation means, count shifts, binarization
//! thresholds) is estimated on the training partition only and then replayed on
//! the test partition.

mod impute;
mod labels;
mod split;
mod stats;
mod table;
mod transform;

pub use impute::{impute, ClampPolicy};
pub(crate) use labels::to_dataset;
pub use labels::{encode_labels, LabelMap, DOS_CLASS_ORDER};
pub use split::{split_indices, stratified_split, SplitSpec};
pub use stats::{compute_column_stats, ColumnStats};
pub use table::{load_csv, load_csv_from_reader, LoadOptions, RawTable, DEFAULT_LABEL_COLUMN};
pub use transform::{Binarizer, CountTransform};

use std::path::PathBuf;
use thiserror::Error;

use crate::dataset::DatasetError;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("input has no header row")]
    MissingHeader,
    #[error("label column {name:?} not found in header")]
    MissingLabelColumn { name: String },
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    UnparseableNumeric { row: usize, column: String, value: String },
    #[error("row {row}: empty label")]
    MissingLabel { row: usize },
    #[error("row {row}: label {label:?} is not in the fixed class ordering")]
    UnknownLabel { row: usize, label: String },
    #[error("row {row}, column {column}: absent value in a table that must be complete")]
    Incomplete { row: usize, column: usize },
    #[error("expected {expected} feature columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("class {class:?} has {rows} row(s); stratified splitting needs at least 2")]
    ClassTooSmall { class: String, rows: usize },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}
