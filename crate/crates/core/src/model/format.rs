//! Versioned JSON model document.
//!
//! ```text
//! { "version": 1, "variant": "bernoulli", "class_names": [...], "log_prior": [...],
//!   "class_counts": [...], "feature_count": d,
//!   "params": { "cond_prob": {"rows": k, "cols": d, "data": [...]}, ... } }
//! ```
//!
//! Floats are written in shortest round-trip form, so every parameter survives a
//! serialize/deserialize cycle bit-for-bit.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    BernoulliParams, ClassPriors, GaussianParams, ModelError, ModelParams, MultinomialParams, ThresholdPolicy,
    TrainedModel, Variant,
};
use crate::matrix::Matrix;

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    version: u64,
    variant: Variant,
    class_names: Vec<String>,
    log_prior: Vec<f64>,
    class_counts: Vec<u64>,
    feature_count: usize,
    params: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianDoc {
    mean: Matrix,
    variance: Matrix,
    var_floor: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultinomialDoc {
    log_cond_prob: Matrix,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BernoulliDoc {
    cond_prob: Matrix,
    binarize_threshold_policy: ThresholdPolicy,
}

pub fn serialize_model(model: &TrainedModel) -> Vec<u8> {
    let params = match model.params() {
        ModelParams::Gaussian(p) => serde_json::to_value(GaussianDoc {
            mean: p.mean().clone(),
            variance: p.variance().clone(),
            var_floor: p.var_floor(),
        }),
        ModelParams::Multinomial(p) => serde_json::to_value(MultinomialDoc {
            log_cond_prob: p.log_cond_prob().clone(),
            alpha: p.alpha(),
        }),
        ModelParams::Bernoulli(p) => serde_json::to_value(BernoulliDoc {
            cond_prob: p.cond_prob().clone(),
            binarize_threshold_policy: p.threshold_policy(),
        }),
    }
    .expect("model parameters are finite");
    let doc = ModelDocument {
        version: MODEL_FORMAT_VERSION,
        variant: model.variant(),
        class_names: model.class_names().to_vec(),
        log_prior: model.priors().log_prior().to_vec(),
        class_counts: model.priors().class_counts().to_vec(),
        feature_count: model.feature_count(),
        params,
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("model document serializes");
    out.push(b'\n');
    out
}

pub fn deserialize_model(bytes: &[u8]) -> Result<TrainedModel, ModelError> {
    let malformed = |e: serde_json::Error| ModelError::MalformedDocument(e.to_string());

    // check the version before the rest of the schema so that future documents get a
    // precise error
    let raw: Value = serde_json::from_slice(bytes).map_err(malformed)?;
    match raw.get("version").and_then(Value::as_u64) {
        Some(MODEL_FORMAT_VERSION) => {}
        Some(found) => {
            return Err(ModelError::VersionMismatch {
                found,
                expected: MODEL_FORMAT_VERSION,
            })
        }
        None => return Err(ModelError::MalformedDocument("missing integer \"version\"".into())),
    }
    let doc: ModelDocument = serde_json::from_value(raw).map_err(malformed)?;

    let k = doc.class_names.len();
    if doc.log_prior.len() != k || doc.class_counts.len() != k {
        return Err(ModelError::InvariantViolation(format!(
            "class_names has {k} entries but log_prior has {} and class_counts {}",
            doc.log_prior.len(),
            doc.class_counts.len()
        )));
    }
    if k == 0 {
        return Err(ModelError::InvariantViolation("model has no classes".into()));
    }
    if doc.log_prior.iter().any(|l| !l.is_finite()) {
        return Err(ModelError::InvariantViolation("non-finite log prior".into()));
    }
    let prior_mass: f64 = doc.log_prior.iter().map(|l| l.exp()).sum();
    if (prior_mass - 1.0).abs() > 1e-9 {
        return Err(ModelError::InvariantViolation(format!(
            "priors sum to {prior_mass}, not 1"
        )));
    }

    let params = match doc.variant {
        Variant::Gaussian => {
            let p: GaussianDoc = serde_json::from_value(doc.params).map_err(malformed)?;
            ModelParams::Gaussian(GaussianParams::new(p.mean, p.variance, p.var_floor)?)
        }
        Variant::Multinomial => {
            let p: MultinomialDoc = serde_json::from_value(doc.params).map_err(malformed)?;
            ModelParams::Multinomial(MultinomialParams::new(p.log_cond_prob, p.alpha)?)
        }
        Variant::Bernoulli => {
            let p: BernoulliDoc = serde_json::from_value(doc.params).map_err(malformed)?;
            ModelParams::Bernoulli(BernoulliParams::new(p.cond_prob, p.binarize_threshold_policy)?)
        }
    };
    let model = TrainedModel::new(
        ClassPriors::from_parts(doc.log_prior, doc.class_counts),
        params,
        doc.class_names,
    )?;
    if model.feature_count() != doc.feature_count {
        return Err(ModelError::InvariantViolation(format!(
            "feature_count {} disagrees with parameter width {}",
            doc.feature_count,
            model.feature_count()
        )));
    }
    Ok(model)
}
