use super::{
    check_training_shape, per_class_sums, priors_for, FitConfig, ModelError, ModelParams, ThresholdPolicy, TrainedModel,
};
use crate::dataset::CleanDataset;
use crate::matrix::Matrix;

/// Per-class probability that each binary feature is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliParams {
    cond_prob: Matrix,
    threshold_policy: ThresholdPolicy,
    log_present: Matrix,
    log_absent: Matrix,
}

impl BernoulliParams {
    pub fn new(cond_prob: Matrix, threshold_policy: ThresholdPolicy) -> Result<Self, ModelError> {
        if let Some(p) = cond_prob.as_slice().iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(ModelError::InvariantViolation(format!(
                "bernoulli probability {p} outside (0, 1)"
            )));
        }
        Ok(Self {
            log_present: cond_prob.map(f64::ln),
            log_absent: cond_prob.map(|p| (-p).ln_1p()),
            cond_prob,
            threshold_policy,
        })
    }

    pub fn cond_prob(&self) -> &Matrix {
        &self.cond_prob
    }

    pub fn threshold_policy(&self) -> ThresholdPolicy {
        self.threshold_policy
    }

    pub(super) fn accumulate(&self, row: &[f64], scores: &mut [f64]) -> Result<(), ModelError> {
        check_binary(row, None)?;
        for (c, score) in scores.iter_mut().enumerate() {
            let present = self.log_present.row(c);
            let absent = self.log_absent.row(c);
            for (i, &x) in row.iter().enumerate() {
                // absent features contribute ln(1 - p)
                *score += if x == 1.0 { present[i] } else { absent[i] };
            }
        }
        Ok(())
    }
}

fn check_binary(row: &[f64], row_index: Option<usize>) -> Result<(), ModelError> {
    match row.iter().position(|&v| v != 0.0 && v != 1.0) {
        Some(column) => Err(ModelError::NonBinaryFeature {
            row: row_index,
            column,
            value: row[column],
        }),
        None => Ok(()),
    }
}

/// `P(t | c) = (N_ct + 1) / (N_c + 2)`, `prior[c] = N_c / N`.
pub fn fit_bernoulli(data: &CleanDataset, config: &FitConfig) -> Result<TrainedModel, ModelError> {
    config.validate()?;
    check_training_shape(data)?;
    for (r, row) in data.features().iter_rows().enumerate() {
        check_binary(row, Some(r))?;
    }
    let priors = priors_for(data)?;

    let mut table = per_class_sums(data, |v| v);
    for (c, &n_c) in priors.class_counts().iter().enumerate() {
        let denom = n_c as f64 + 2.0;
        table
            .row_mut(c)
            .iter_mut()
            .for_each(|n_ct| *n_ct = (*n_ct + 1.0) / denom);
    }

    let params = BernoulliParams::new(table, config.threshold_policy)?;
    TrainedModel::new(priors, ModelParams::Bernoulli(params), data.class_names().to_vec())
}
