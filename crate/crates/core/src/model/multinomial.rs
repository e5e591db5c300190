use super::{check_training_shape, per_class_sums, priors_for, FitConfig, ModelError, ModelParams, TrainedModel};
use crate::dataset::CleanDataset;
use crate::matrix::Matrix;

/// Smoothed per-class term probabilities, stored as logs.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialParams {
    log_cond_prob: Matrix,
    alpha: f64,
}

impl MultinomialParams {
    pub fn new(log_cond_prob: Matrix, alpha: f64) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ModelError::InvariantViolation(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        for (c, row) in log_cond_prob.iter_rows().enumerate() {
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v <= 0.0)) {
                return Err(ModelError::InvariantViolation(format!(
                    "class {c}: log probability {v} must be finite and <= 0"
                )));
            }
            let total: f64 = row.iter().map(|l| l.exp()).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(ModelError::InvariantViolation(format!(
                    "class {c}: term probabilities sum to {total}, not 1"
                )));
            }
        }
        Ok(Self { log_cond_prob, alpha })
    }

    pub fn log_cond_prob(&self) -> &Matrix {
        &self.log_cond_prob
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub(super) fn accumulate(&self, row: &[f64], scores: &mut [f64]) -> Result<(), ModelError> {
        check_counts(row, None)?;
        for (c, score) in scores.iter_mut().enumerate() {
            *score += row
                .iter()
                .zip(self.log_cond_prob.row(c))
                .map(|(&x, &lp)| x * lp)
                .sum::<f64>();
        }
        Ok(())
    }
}

fn check_counts(row: &[f64], row_index: Option<usize>) -> Result<(), ModelError> {
    for (column, &value) in row.iter().enumerate() {
        if !value.is_finite() {
            return Err(ModelError::NonFinite { row: row_index, column });
        }
        if value < 0.0 {
            return Err(ModelError::NegativeFeature {
                row: row_index,
                column,
                value,
            });
        }
    }
    Ok(())
}

/// `P(t_i | c) = (S_ci + α) / (S_c + α·d)` where `S_ci` sums feature `i` over the
/// rows of class `c`. Fractional "counts" are accepted.
pub fn fit_multinomial(data: &CleanDataset, config: &FitConfig) -> Result<TrainedModel, ModelError> {
    config.validate()?;
    check_training_shape(data)?;
    for (r, row) in data.features().iter_rows().enumerate() {
        check_counts(row, Some(r))?;
    }
    let priors = priors_for(data)?;
    let alpha = config.alpha;
    let d = data.n_features() as f64;

    let mut table = per_class_sums(data, |v| v);
    for c in 0..table.rows() {
        let row = table.row_mut(c);
        let denom = (row.iter().sum::<f64>() + alpha * d).ln();
        row.iter_mut().for_each(|s| *s = (*s + alpha).ln() - denom);
    }

    let params = MultinomialParams::new(table, alpha)?;
    TrainedModel::new(priors, ModelParams::Multinomial(params), data.class_names().to_vec())
}
