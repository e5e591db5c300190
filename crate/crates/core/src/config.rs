//! Run configuration shared by every pipeline stage.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::model::FitConfig;
use crate::preprocess::{SplitSpec, DEFAULT_LABEL_COLUMN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectMethod {
    Chi2,
    #[default]
    Corr,
    /// Keep every usable column.
    None,
}

impl std::str::FromStr for SelectMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chi2" => Ok(Self::Chi2),
            "corr" => Ok(Self::Corr),
            "none" => Ok(Self::None),
            other => Err(format!(
                "unknown selection method {other:?} (expected chi2, corr, or none)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub method: SelectMethod,
    pub k: usize,
    pub corr_threshold: f64,
    pub bins: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            method: SelectMethod::Corr,
            k: 10,
            corr_threshold: 0.5,
            bins: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub label_column: String,
    /// Identifier-like columns removed at load time.
    pub drop_columns: Vec<String>,
    /// Columns allowed to stay negative after imputation; all others are clamped at zero.
    pub signed_columns: Vec<String>,
    /// Fixed class-id order; first appearance in the input when absent.
    pub class_order: Option<Vec<String>>,
    pub split: SplitSpec,
    pub selection: SelectionConfig,
    pub fit: FitConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            drop_columns: Vec::new(),
            signed_columns: Vec::new(),
            class_order: None,
            split: SplitSpec::default(),
            selection: SelectionConfig::default(),
            fit: FitConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
