//! Gaussian, multinomial, and Bernoulli naive Bayes over a shared classifier
//! contract.
//!
//! Every score is a joint log-likelihood `ln P(c) + Σ_i ln P(x_i | c)`; no
//! probability products are ever formed. Posteriors are recovered with a
//! max-shifted softmax.

mod bernoulli;
mod format;
mod gaussian;
mod multinomial;

pub use bernoulli::{fit_bernoulli, BernoulliParams};
pub use format::{deserialize_model, serialize_model, MODEL_FORMAT_VERSION};
pub use gaussian::{fit_gaussian, gaussian_log_density, GaussianParams};
pub use multinomial::{fit_multinomial, MultinomialParams};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::dataset::CleanDataset;
use crate::math;
use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("class {class} ({name}) has no training rows")]
    EmptyClass { class: usize, name: String },
    #[error("dataset has no rows, no features, or no classes")]
    EmptyDataset,
    #[error("non-finite value at {}", location(*.row, *.column))]
    NonFinite { row: Option<usize>, column: usize },
    #[error("negative value {value} at {} (multinomial features must be >= 0)", location(*.row, *.column))]
    NegativeFeature {
        row: Option<usize>,
        column: usize,
        value: f64,
    },
    #[error("non-binary value {value} at {} (bernoulli features must be 0 or 1)", location(*.row, *.column))]
    NonBinaryFeature {
        row: Option<usize>,
        column: usize,
        value: f64,
    },
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed model document: {0}")]
    MalformedDocument(String),
    #[error("unsupported model document version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("model invariant violated: {0}")]
    InvariantViolation(String),
}

fn location(row: Option<usize>, column: usize) -> String {
    match row {
        Some(r) => format!("row {r}, column {column}"),
        None => format!("column {column}"),
    }
}

/// The three naive Bayes variants, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Gaussian,
    Multinomial,
    Bernoulli,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Gaussian, Variant::Multinomial, Variant::Bernoulli];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Gaussian => "gaussian",
            Variant::Multinomial => "multinomial",
            Variant::Bernoulli => "bernoulli",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Variant::Gaussian),
            "multinomial" => Ok(Variant::Multinomial),
            "bernoulli" => Ok(Variant::Bernoulli),
            other => Err(ModelError::MalformedDocument(format!("unknown variant {other:?}"))),
        }
    }
}

/// How the binary inputs of a Bernoulli model were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// `x > median(train column)`.
    #[default]
    TrainMedian,
    /// Input was already 0/1.
    PreBinarized,
}

impl ThresholdPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdPolicy::TrainMedian => "train_median",
            ThresholdPolicy::PreBinarized => "pre_binarized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Additive smoothing for the multinomial estimator.
    pub alpha: f64,
    /// Gaussian variance floor as a fraction of the largest whole-data feature variance.
    pub var_epsilon: f64,
    pub threshold_policy: ThresholdPolicy,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            var_epsilon: 1e-9,
            threshold_policy: ThresholdPolicy::TrainMedian,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.var_epsilon.is_finite() && self.var_epsilon > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "var_epsilon must be > 0, got {}",
                self.var_epsilon
            )));
        }
        Ok(())
    }
}

/// Class frequencies estimated from the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPriors {
    log_prior: Vec<f64>,
    class_counts: Vec<u64>,
    total_count: u64,
}

impl ClassPriors {
    /// `prior[c] = N_c / N`. Every class must have at least one row.
    pub fn from_counts(class_counts: Vec<u64>, class_names: &[String]) -> Result<Self, ModelError> {
        if let Some(class) = class_counts.iter().position(|&n| n == 0) {
            return Err(ModelError::EmptyClass {
                class,
                name: class_names.get(class).cloned().unwrap_or_default(),
            });
        }
        let total_count: u64 = class_counts.iter().sum();
        if total_count == 0 {
            return Err(ModelError::EmptyDataset);
        }
        let n = total_count as f64;
        let log_prior = class_counts.iter().map(|&nc| (nc as f64 / n).ln()).collect();
        Ok(Self {
            log_prior,
            class_counts,
            total_count,
        })
    }

    pub(crate) fn from_parts(log_prior: Vec<f64>, class_counts: Vec<u64>) -> Self {
        let total_count = class_counts.iter().sum();
        Self {
            log_prior,
            class_counts,
            total_count,
        }
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    pub fn class_counts(&self) -> &[u64] {
        &self.class_counts
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn class_count(&self) -> usize {
        self.log_prior.len()
    }

    /// `exp(log_prior)`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.log_prior.iter().map(|l| l.exp()).collect()
    }

    /// Adds the same constant to every log prior. The argmax of any score vector is
    /// unchanged by this.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            log_prior: self.log_prior.iter().map(|l| l + delta).collect(),
            class_counts: self.class_counts.clone(),
            total_count: self.total_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Gaussian(GaussianParams),
    Multinomial(MultinomialParams),
    Bernoulli(BernoulliParams),
}

impl ModelParams {
    pub fn variant(&self) -> Variant {
        match self {
            ModelParams::Gaussian(_) => Variant::Gaussian,
            ModelParams::Multinomial(_) => Variant::Multinomial,
            ModelParams::Bernoulli(_) => Variant::Bernoulli,
        }
    }

    fn shape(&self) -> (usize, usize) {
        let m = match self {
            ModelParams::Gaussian(p) => p.mean(),
            ModelParams::Multinomial(p) => p.log_cond_prob(),
            ModelParams::Bernoulli(p) => p.cond_prob(),
        };
        (m.rows(), m.cols())
    }
}

/// A fitted classifier. Immutable once built; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    priors: ClassPriors,
    params: ModelParams,
    class_names: Vec<String>,
}

impl TrainedModel {
    /// Assembles a model and checks that the parameter shapes agree with the priors
    /// and class names.
    pub fn new(priors: ClassPriors, params: ModelParams, class_names: Vec<String>) -> Result<Self, ModelError> {
        let (rows, cols) = params.shape();
        if rows != priors.class_count() || class_names.len() != priors.class_count() {
            return Err(ModelError::InvariantViolation(format!(
                "class count disagreement: priors {}, params {}, class_names {}",
                priors.class_count(),
                rows,
                class_names.len()
            )));
        }
        if cols == 0 {
            return Err(ModelError::InvariantViolation("model has no features".into()));
        }
        Ok(Self {
            priors,
            params,
            class_names,
        })
    }

    pub fn variant(&self) -> Variant {
        self.params.variant()
    }

    pub fn priors(&self) -> &ClassPriors {
        &self.priors
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn feature_count(&self) -> usize {
        self.params.shape().1
    }

    /// Same model with `delta` added to every log prior.
    pub fn with_shifted_priors(&self, delta: f64) -> Self {
        Self {
            priors: self.priors.shifted(delta),
            params: self.params.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// `ln P(c) + Σ_i ln P(x_i | c)` for every class.
    pub fn joint_log_likelihood(&self, row: &[f64]) -> Result<Vec<f64>, ModelError> {
        if row.len() != self.feature_count() {
            return Err(ModelError::DimensionMismatch {
                expected: self.feature_count(),
                found: row.len(),
            });
        }
        let mut scores = self.priors.log_prior.clone();
        match &self.params {
            ModelParams::Gaussian(p) => p.accumulate(row, &mut scores)?,
            ModelParams::Multinomial(p) => p.accumulate(row, &mut scores)?,
            ModelParams::Bernoulli(p) => p.accumulate(row, &mut scores)?,
        }
        Ok(scores)
    }

    /// MAP class; ties go to the lowest class id.
    pub fn predict(&self, row: &[f64]) -> Result<usize, ModelError> {
        let scores = self.joint_log_likelihood(row)?;
        Ok(math::argmax(&scores).expect("model has at least one class"))
    }

    /// Posterior class probabilities; sums to one.
    pub fn predict_posterior(&self, row: &[f64]) -> Result<Vec<f64>, ModelError> {
        Ok(math::softmax(&self.joint_log_likelihood(row)?))
    }

    /// Natural log of [`predict_posterior`](Self::predict_posterior), normalized with
    /// log-sum-exp.
    pub fn predict_log_posterior(&self, row: &[f64]) -> Result<Vec<f64>, ModelError> {
        Ok(math::log_softmax(&self.joint_log_likelihood(row)?))
    }

    pub fn predict_all(&self, features: &Matrix) -> Result<Vec<usize>, ModelError> {
        features.iter_rows().map(|r| self.predict(r)).collect()
    }
}

/// Fits the variant named by `variant`.
pub fn fit(variant: Variant, data: &CleanDataset, config: &FitConfig) -> Result<TrainedModel, ModelError> {
    match variant {
        Variant::Gaussian => fit_gaussian(data, config),
        Variant::Multinomial => fit_multinomial(data, config),
        Variant::Bernoulli => fit_bernoulli(data, config),
    }
}

fn check_training_shape(data: &CleanDataset) -> Result<(), ModelError> {
    if data.n_rows() == 0 || data.n_features() == 0 || data.class_count() == 0 {
        return Err(ModelError::EmptyDataset);
    }
    Ok(())
}

fn priors_for(data: &CleanDataset) -> Result<ClassPriors, ModelError> {
    let counts = data.class_counts().into_iter().map(|n| n as u64).collect();
    ClassPriors::from_counts(counts, data.class_names())
}

/// Sums each feature over the rows of each class: `(class_count × d)`.
fn per_class_sums(data: &CleanDataset, f: impl Fn(f64) -> f64) -> Matrix {
    let mut sums = Matrix::zeros(data.class_count(), data.n_features());
    for (row, &label) in data.features().iter_rows().zip(data.labels()) {
        for (acc, &x) in sums.row_mut(label).iter_mut().zip(row) {
            *acc += f(x);
        }
    }
    sums
}
