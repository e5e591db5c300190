//! Confusion matrices, accuracy, per-class precision/recall, and the
//! three-variant comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{CleanDataset, Transform};
use crate::model::{self, FitConfig, ModelError, TrainedModel, Variant};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("truth has {truth} labels but predictions have {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("position {index}: class id {id} is outside 0..{class_count}")]
    IdOutOfRange {
        index: usize,
        id: usize,
        class_count: usize,
    },
    #[error("cannot compute accuracy over zero rows")]
    EmptyEvaluation,
    #[error("datasets do not share one transform lineage: {0}")]
    ManifestMismatch(String),
    #[error("{variant}: {source}")]
    Model {
        variant: Variant,
        #[source]
        source: ModelError,
    },
}

/// Rows are true classes, columns are predicted classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

pub fn confusion_matrix(
    truth: &[usize],
    predicted: &[usize],
    class_count: usize,
) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let mut counts = vec![vec![0u64; class_count]; class_count];
    for (index, (&t, &p)) in truth.iter().zip(predicted).enumerate() {
        for id in [t, p] {
            if id >= class_count {
                return Err(EvalError::IdOutOfRange { index, id, class_count });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        class_names: (0..class_count).map(|c| c.to_string()).collect(),
        counts,
    })
}

pub fn accuracy(confusion: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = confusion.total();
    if total == 0 {
        return Err(EvalError::EmptyEvaluation);
    }
    Ok(confusion.trace() as f64 / total as f64)
}

impl ConfusionMatrix {
    pub fn with_class_names(mut self, names: &[String]) -> Self {
        assert_eq!(names.len(), self.counts.len());
        self.class_names = names.to_vec();
        self
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Rows of true class `c`.
    pub fn support(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    /// Rows predicted as `c`.
    pub fn predicted_count(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }

    /// `TP / predicted`; 0 when nothing was predicted as `c`.
    pub fn precision(&self, c: usize) -> f64 {
        ratio(self.counts[c][c], self.predicted_count(c))
    }

    /// `TP / support`; 0 when the class has no rows.
    pub fn recall(&self, c: usize) -> f64 {
        ratio(self.counts[c][c], self.support(c))
    }

    /// Relabels class `i` as `perm[i]` on both axes.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let k = self.class_count();
        let mut counts = vec![vec![0; k]; k];
        let mut names = vec![String::new(); k];
        for i in 0..k {
            names[perm[i]] = self.class_names[i].clone();
            for j in 0..k {
                counts[perm[i]][perm[j]] = self.counts[i][j];
            }
        }
        Self {
            class_names: names,
            counts,
        }
    }

    pub fn per_class(&self) -> Vec<ClassMetrics> {
        (0..self.class_count())
            .map(|c| ClassMetrics {
                class: self.class_names[c].clone(),
                precision: self.precision(c),
                recall: self.recall(c),
                support: self.support(c),
            })
            .collect()
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

/// Five-number summary; quartiles use linear interpolation between order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Self {
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub variant: Variant,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// `train_accuracy − test_accuracy`.
    pub overfit_gap: f64,
    /// On the test partition.
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    /// Spread of per-class test recall.
    pub recall_box: Option<BoxStats>,
}

/// Train and test partitions produced by one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: CleanDataset,
    pub test: CleanDataset,
}

/// The three transform paths of one cleaned split.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantDatasets {
    pub continuous: SplitPair,
    pub counts: SplitPair,
    pub binary: SplitPair,
}

impl VariantDatasets {
    /// The dataset each variant consumes.
    pub fn for_variant(&self, variant: Variant) -> &SplitPair {
        match variant {
            Variant::Gaussian => &self.continuous,
            Variant::Multinomial => &self.counts,
            Variant::Bernoulli => &self.binary,
        }
    }

    fn check_lineage(&self) -> Result<(), EvalError> {
        let base = &self.continuous;
        for (pair, tag) in [
            (&self.continuous, Transform::Continuous),
            (&self.counts, Transform::Counts),
            (&self.binary, Transform::Binary),
        ] {
            for (d, b, side) in [(&pair.train, &base.train, "train"), (&pair.test, &base.test, "test")] {
                if d.transform() != tag {
                    return Err(EvalError::ManifestMismatch(format!(
                        "{side} dataset tagged {} where {tag} was expected",
                        d.transform()
                    )));
                }
                if d.labels() != b.labels()
                    || d.class_names() != b.class_names()
                    || d.column_names() != b.column_names()
                {
                    return Err(EvalError::ManifestMismatch(format!(
                        "{tag} {side} rows, labels, or columns differ from the continuous {side} set"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How a comparison run was produced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub train_rows: usize,
    pub test_rows: usize,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub train_accuracy_basis: String,
    pub seed: Option<u64>,
    pub input_digest: Option<String>,
    pub manifest_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub provenance: Provenance,
    pub variants: Vec<EvalReport>,
    /// By test accuracy, best first; ties keep declaration order.
    pub ranking: Vec<Variant>,
}

impl ComparisonReport {
    pub fn get(&self, variant: Variant) -> Option<&EvalReport> {
        self.variants.iter().find(|r| r.variant == variant)
    }
}

fn evaluate(model: &TrainedModel, data: &CleanDataset) -> Result<ConfusionMatrix, ModelError> {
    let predicted = model.predict_all(data.features())?;
    Ok(confusion_matrix(data.labels(), &predicted, data.class_count())
        .expect("predictions are valid class ids")
        .with_class_names(data.class_names()))
}

/// Fits one variant and scores it on both partitions.
pub fn evaluate_variant(
    variant: Variant,
    pair: &SplitPair,
    config: &FitConfig,
) -> Result<(EvalReport, TrainedModel), EvalError> {
    let wrap = |source| EvalError::Model { variant, source };
    let model = model::fit(variant, &pair.train, config).map_err(wrap)?;
    let train_cm = evaluate(&model, &pair.train).map_err(wrap)?;
    let test_cm = evaluate(&model, &pair.test).map_err(wrap)?;
    let train_accuracy = accuracy(&train_cm)?;
    let test_accuracy = accuracy(&test_cm)?;
    let per_class = test_cm.per_class();
    let recalls: Vec<f64> = per_class.iter().map(|m| m.recall).collect();
    let report = EvalReport {
        variant,
        train_accuracy,
        test_accuracy,
        overfit_gap: train_accuracy - test_accuracy,
        recall_box: BoxStats::from_values(&recalls),
        confusion: test_cm,
        per_class,
    };
    Ok((report, model))
}

/// Fits all three variants on their own transform of the training partition and
/// ranks them by test accuracy.
pub fn compare_variants(
    data: &VariantDatasets,
    config: &FitConfig,
) -> Result<(ComparisonReport, Vec<TrainedModel>), EvalError> {
    data.check_lineage()?;
    let mut reports = Vec::with_capacity(3);
    let mut models = Vec::with_capacity(3);
    for variant in Variant::ALL {
        let (r, m) = evaluate_variant(variant, data.for_variant(variant), config)?;
        reports.push(r);
        models.push(m);
    }
    let ranking = rank(&reports);
    let base = &data.continuous;
    let provenance = Provenance {
        train_rows: base.train.n_rows(),
        test_rows: base.test.n_rows(),
        class_names: base.train.class_names().to_vec(),
        feature_names: base.train.column_names().to_vec(),
        train_accuracy_basis: "full training partition".into(),
        ..Provenance::default()
    };
    Ok((
        ComparisonReport {
            provenance,
            variants: reports,
            ranking,
        },
        models,
    ))
}

fn rank(reports: &[EvalReport]) -> Vec<Variant> {
    let mut order: Vec<&EvalReport> = reports.iter().collect();
    order.sort_by(|a, b| b.test_accuracy.total_cmp(&a.test_accuracy));
    order.into_iter().map(|r| r.variant).collect()
}
