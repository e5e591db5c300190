use super::{
    check_training_shape, per_class_sums, priors_for, ClassPriors, FitConfig, ModelError, ModelParams, TrainedModel,
};
use crate::dataset::CleanDataset;
use crate::math::LN_2PI;
use crate::matrix::Matrix;

/// Per-class feature means and variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    mean: Matrix,
    variance: Matrix,
    var_floor: f64,
}

impl GaussianParams {
    pub fn new(mean: Matrix, variance: Matrix, var_floor: f64) -> Result<Self, ModelError> {
        if mean.rows() != variance.rows() || mean.cols() != variance.cols() {
            return Err(ModelError::InvariantViolation(
                "gaussian mean and variance shapes differ".into(),
            ));
        }
        if !(var_floor.is_finite() && var_floor > 0.0) {
            return Err(ModelError::InvariantViolation(format!(
                "var_floor must be positive and finite, got {var_floor}"
            )));
        }
        if !mean.all_finite() {
            return Err(ModelError::InvariantViolation("non-finite gaussian mean".into()));
        }
        if let Some(v) = variance
            .as_slice()
            .iter()
            .find(|&&v| !(v.is_finite() && v >= var_floor))
        {
            return Err(ModelError::InvariantViolation(format!(
                "variance {v} is below var_floor {var_floor} or non-finite"
            )));
        }
        Ok(Self {
            mean,
            variance,
            var_floor,
        })
    }

    pub fn mean(&self) -> &Matrix {
        &self.mean
    }

    pub fn variance(&self) -> &Matrix {
        &self.variance
    }

    pub fn var_floor(&self) -> f64 {
        self.var_floor
    }

    pub(super) fn accumulate(&self, row: &[f64], scores: &mut [f64]) -> Result<(), ModelError> {
        if let Some(column) = row.iter().position(|x| !x.is_finite()) {
            return Err(ModelError::NonFinite { row: None, column });
        }
        for (c, score) in scores.iter_mut().enumerate() {
            let means = self.mean.row(c);
            let vars = self.variance.row(c);
            *score += row
                .iter()
                .zip(means.iter().zip(vars))
                .map(|(&x, (&mu, &var))| gaussian_log_density(x, mu, var))
                .sum::<f64>();
        }
        Ok(())
    }
}

/// Log of the normal density `exp(-(x-μ)²/2σ²) / sqrt(2πσ²)`.
#[inline]
pub fn gaussian_log_density(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + variance.ln()) - d * d / (2.0 * variance)
}

/// Fits per-class means and population variances. Every variance is lifted by
/// `var_floor = var_epsilon × max_i Var(feature i over all rows)`; when every
/// feature is constant the floor falls back to `var_epsilon` itself.
pub fn fit_gaussian(data: &CleanDataset, config: &FitConfig) -> Result<TrainedModel, ModelError> {
    config.validate()?;
    check_training_shape(data)?;
    let x = data.features();
    for (r, row) in x.iter_rows().enumerate() {
        if let Some(column) = row.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite { row: Some(r), column });
        }
    }
    let priors: ClassPriors = priors_for(data)?;

    let d = data.n_features();
    let max_total_var = (0..d).map(|i| population_variance(&x.column(i))).fold(0.0, f64::max);
    let var_floor = if max_total_var > 0.0 {
        config.var_epsilon * max_total_var
    } else {
        config.var_epsilon
    };

    let mut mean = per_class_sums(data, |v| v);
    for (c, &n) in priors.class_counts().iter().enumerate() {
        let n = n as f64;
        mean.row_mut(c).iter_mut().for_each(|s| *s /= n);
    }

    let mut variance = Matrix::zeros(data.class_count(), d);
    for (row, &label) in x.iter_rows().zip(data.labels()) {
        let mu = mean.row(label).to_vec();
        for ((acc, &v), m) in variance.row_mut(label).iter_mut().zip(row).zip(mu) {
            let dev = v - m;
            *acc += dev * dev;
        }
    }
    for (c, &n) in priors.class_counts().iter().enumerate() {
        let n = n as f64;
        variance.row_mut(c).iter_mut().for_each(|s| *s = *s / n + var_floor);
    }

    let params = GaussianParams::new(mean, variance, var_floor)?;
    TrainedModel::new(priors, ModelParams::Gaussian(params), data.class_names().to_vec())
}

fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}
