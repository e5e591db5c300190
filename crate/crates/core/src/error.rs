use std::path::PathBuf;
use thiserror::Error;

use crate::eval::EvalError;
use crate::model::ModelError;
use crate::preprocess::PreprocessError;
use crate::report::ReportError;
use crate::select::SelectError;
use crate::synth::SynthError;

/// Any failure of a pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True when the failure is caused by the input data or configuration
    /// rather than by the environment or a bug.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Preprocess(_) | Error::Select(_) | Error::Config(_) => true,
            Error::Synth(e) => matches!(e, SynthError::InvalidDimensions(_)),
            Error::Model(e) => !matches!(e, ModelError::InvariantViolation(_)),
            Error::Eval(e) => match e {
                EvalError::Model { source, .. } => !matches!(source, ModelError::InvariantViolation(_)),
                EvalError::EmptyEvaluation => true,
                _ => false,
            },
            Error::Report(_) | Error::Write { .. } => false,
        }
    }
}
