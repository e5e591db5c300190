//! Naive Bayes variants (Gaussian, multinomial, Bernoulli) and an offline
//! network-intrusion-detection experiment pipeline built on them: flow-table
//! cleaning, supervised feature selection, training, evaluation, and chart output.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod math;
pub mod matrix;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod report;
pub mod select;
pub mod synth;

pub use config::{RunConfig, SelectMethod, SelectionConfig};
pub use dataset::{CleanDataset, DatasetError, Transform};
pub use error::Error;
pub use matrix::Matrix;
pub use model::{
    deserialize_model, fit, fit_bernoulli, fit_gaussian, fit_multinomial, serialize_model, ClassPriors, FitConfig,
    ModelError, ModelParams, ThresholdPolicy, TrainedModel, Variant,
};
