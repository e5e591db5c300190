//! Supervised feature selection: chi-square scoring of quantile-binned features
//! against the class label, and absolute Pearson correlation with the class id.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::dataset::CleanDataset;

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("k = {k} exceeds the feature count {features}")]
    KExceedsFeatureCount { k: usize, features: usize },
    #[error("bin count must be positive")]
    InvalidBins,
    #[error("contingency table rows have different lengths")]
    RaggedTable,
    #[error("contingency table is empty")]
    EmptyTable,
    #[error("threshold must be finite, got {0}")]
    InvalidThreshold(f64),
}

/// Quantile binning into at most `bins` non-empty bins.
///
/// Cut points are the order statistics at positions `⌊j·n/bins⌋`, `j = 1..bins`.
/// Cuts equal to the column minimum or to an earlier cut are dropped, and a
/// value's bin is the number of cuts `≤` it. Every cut is itself a data value, so
/// every bin is non-empty. Scaling by a positive constant leaves the bins unchanged.
pub fn bin_continuous(column: &[f64], bins: usize) -> Vec<usize> {
    if column.is_empty() || bins <= 1 {
        return vec![0; column.len()];
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let min = sorted[0];
    let mut cuts: Vec<f64> = Vec::with_capacity(bins - 1);
    for j in 1..bins {
        let cut = sorted[(j * n / bins).min(n - 1)];
        if cut > min && cuts.last().is_none_or(|&last| cut > last) {
            cuts.push(cut);
        }
    }
    column.iter().map(|&v| cuts.partition_point(|&c| c <= v)).collect()
}

/// Observed counts, rows = feature bins, columns = classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    observed: Vec<Vec<u64>>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    grand_total: u64,
}

impl ContingencyTable {
    pub fn from_counts(observed: Vec<Vec<u64>>) -> Result<Self, SelectError> {
        let cols = observed.first().map_or(0, Vec::len);
        if observed.iter().any(|r| r.len() != cols) {
            return Err(SelectError::RaggedTable);
        }
        let row_totals: Vec<u64> = observed.iter().map(|r| r.iter().sum()).collect();
        let col_totals: Vec<u64> = (0..cols).map(|j| observed.iter().map(|r| r[j]).sum()).collect();
        let grand_total: u64 = row_totals.iter().sum();
        if grand_total == 0 {
            return Err(SelectError::EmptyTable);
        }
        Ok(Self {
            observed,
            row_totals,
            col_totals,
            grand_total,
        })
    }

    /// Cross-tabulates bin ids against class ids.
    pub fn tabulate(bin_ids: &[usize], labels: &[usize], class_count: usize) -> Result<Self, SelectError> {
        let n_bins = bin_ids.iter().max().map_or(0, |m| m + 1);
        let mut observed = vec![vec![0u64; class_count]; n_bins];
        for (&b, &l) in bin_ids.iter().zip(labels) {
            observed[b][l] += 1;
        }
        Self::from_counts(observed)
    }

    pub fn observed(&self) -> &[Vec<u64>] {
        &self.observed
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    pub fn transpose(&self) -> Self {
        let cols = self.col_totals.len();
        let observed = (0..cols)
            .map(|j| self.observed.iter().map(|r| r[j]).collect())
            .collect();
        Self::from_counts(observed).expect("transpose of a valid table")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    /// Fewer than two non-empty rows or columns; `statistic` is 0.
    pub degenerate: bool,
}

/// Pearson's independence statistic `Σ (O − E)² / E`, `E = row·col / total`,
/// over the table with empty rows and columns removed.
pub fn chi_square_statistic(table: &ContingencyTable) -> ChiSquare {
    let rows: Vec<usize> = (0..table.row_totals.len())
        .filter(|&i| table.row_totals[i] > 0)
        .collect();
    let cols: Vec<usize> = (0..table.col_totals.len())
        .filter(|&j| table.col_totals[j] > 0)
        .collect();
    if rows.len() < 2 || cols.len() < 2 {
        return ChiSquare {
            statistic: 0.0,
            dof: 0,
            degenerate: true,
        };
    }
    let total = table.grand_total as f64;
    let mut statistic = 0.0;
    for &i in &rows {
        let rt = table.row_totals[i] as f64;
        for &j in &cols {
            let expected = rt * table.col_totals[j] as f64 / total;
            let diff = table.observed[i][j] as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    ChiSquare {
        statistic,
        dof: (rows.len() - 1) * (cols.len() - 1),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    Chi2TopK,
    CorrThreshold,
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMethod::Chi2TopK => "chi2_topk",
            SelectionMethod::CorrThreshold => "corr_threshold",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionParameters {
    pub k: Option<usize>,
    pub threshold: Option<f64>,
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub name: String,
    pub score: f64,
    pub selected: bool,
}

/// Scores for every candidate feature plus the retained subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub method: SelectionMethod,
    pub parameters: SelectionParameters,
    pub features: Vec<FeatureScore>,
    /// Chi-square: by descending score, ties to the lower index. Correlation: ascending index.
    pub selected: Vec<usize>,
    /// Nothing passed the threshold.
    pub empty_selection: bool,
}

impl SelectionReport {
    pub fn scores(&self) -> Vec<f64> {
        self.features.iter().map(|f| f.score).collect()
    }

    /// Selected indices in ascending order, for column projection.
    pub fn selected_sorted(&self) -> Vec<usize> {
        let mut s = self.selected.clone();
        s.sort_unstable();
        s
    }

    fn build(
        method: SelectionMethod,
        parameters: SelectionParameters,
        names: &[String],
        scores: Vec<f64>,
        selected: Vec<usize>,
    ) -> Self {
        let features = names
            .iter()
            .zip(&scores)
            .enumerate()
            .map(|(i, (name, &score))| FeatureScore {
                name: name.clone(),
                score,
                selected: selected.contains(&i),
            })
            .collect();
        Self {
            method,
            parameters,
            features,
            empty_selection: selected.is_empty(),
            selected,
        }
    }
}

/// Chi-square score of every feature after quantile binning.
pub fn chi2_scores(data: &CleanDataset, bins: usize) -> Result<Vec<f64>, SelectError> {
    if bins == 0 {
        return Err(SelectError::InvalidBins);
    }
    let x = data.features();
    (0..data.n_features())
        .map(|c| {
            let binned = bin_continuous(&x.column(c), bins);
            let table = ContingencyTable::tabulate(&binned, data.labels(), data.class_count())?;
            Ok(chi_square_statistic(&table).statistic)
        })
        .collect()
}

/// Keeps the `k` features with the largest chi-square statistic.
pub fn select_top_k_chi2(data: &CleanDataset, k: usize, bins: usize) -> Result<SelectionReport, SelectError> {
    let d = data.n_features();
    if k > d {
        return Err(SelectError::KExceedsFeatureCount { k, features: d });
    }
    let scores = if data.n_rows() == 0 {
        vec![0.0; d]
    } else {
        chi2_scores(data, bins)?
    };
    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps the lower index first on ties
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    Ok(SelectionReport::build(
        SelectionMethod::Chi2TopK,
        SelectionParameters {
            k: Some(k),
            threshold: None,
            bins: Some(bins),
        },
        data.column_names(),
        scores,
        order,
    ))
}

/// `|r|` between each feature and the numeric class id. Zero-variance features
/// (or a constant label) score 0.
pub fn correlation_with_target(data: &CleanDataset) -> Vec<f64> {
    let n = data.n_rows();
    if n == 0 {
        return vec![0.0; data.n_features()];
    }
    let y: Vec<f64> = data.labels().iter().map(|&l| l as f64).collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let syy: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let x = data.features();
    (0..data.n_features())
        .map(|c| {
            let col = x.column(c);
            let x_mean = col.iter().sum::<f64>() / n as f64;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (xi, yi) in col.iter().zip(&y) {
                let dx = xi - x_mean;
                sxy += dx * (yi - y_mean);
                sxx += dx * dx;
            }
            if sxx <= 0.0 || syy <= 0.0 {
                0.0
            } else {
                (sxy / (sxx.sqrt() * syy.sqrt())).abs().min(1.0)
            }
        })
        .collect()
}

/// Keeps features whose absolute correlation with the class id is strictly
/// greater than `threshold`.
pub fn select_by_correlation(data: &CleanDataset, threshold: f64) -> Result<SelectionReport, SelectError> {
    if !threshold.is_finite() {
        return Err(SelectError::InvalidThreshold(threshold));
    }
    let scores = correlation_with_target(data);
    let selected: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > threshold).collect();
    Ok(SelectionReport::build(
        SelectionMethod::CorrThreshold,
        SelectionParameters {
            k: None,
            threshold: Some(threshold),
            bins: None,
        },
        data.column_names(),
        scores,
        selected,
    ))
}
