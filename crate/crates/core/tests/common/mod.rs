//! Independent reference implementations shared by the property and
//! acceptance tests. Nothing here calls into the fitted-model code paths.
#![allow(dead_code)]

use std::collections::BTreeSet;

use bayesnid_core::{CleanDataset, FitConfig, Matrix, Transform, Variant};
use rand::Rng;

/// A tiny labelled table: rows of features plus class ids `0..classes`.
#[derive(Debug, Clone)]
pub struct Tiny {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl Tiny {
    pub fn dataset(&self, transform: Transform) -> CleanDataset {
        let names = (0..self.classes).map(|c| format!("c{c}")).collect();
        let m = Matrix::from_rows(&self.rows).unwrap();
        CleanDataset::from_parts(m, self.labels.clone(), names, transform).unwrap()
    }
}

/// Random instance with `n ≤ 20`, `d ≤ 4`, `classes ≤ 3`; every class gets a row.
/// Binary tables draw from {0, 1}, others from the integers 0..=9.
pub fn random_tiny<R: Rng>(rng: &mut R, binary: bool) -> Tiny {
    let classes = rng.random_range(1..=3);
    let n = rng.random_range(classes..=20);
    let d = rng.random_range(1..=4);
    let hi = if binary { 1 } else { 9 };
    let labels = (0..n)
        .map(|i| if i < classes { i } else { rng.random_range(0..classes) })
        .collect();
    let rows = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0..=hi) as f64).collect())
        .collect();
    Tiny { rows, labels, classes }
}

pub fn random_query<R: Rng>(rng: &mut R, d: usize, binary: bool) -> Vec<f64> {
    let hi = if binary { 1 } else { 9 };
    (0..d).map(|_| rng.random_range(0..=hi) as f64).collect()
}

fn class_rows(t: &Tiny, c: usize) -> Vec<&Vec<f64>> {
    t.rows
        .iter()
        .zip(&t.labels)
        .filter(|(_, &l)| l == c)
        .map(|(r, _)| r)
        .collect()
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Re-estimates every parameter from scratch and scores `x` for each class.
pub fn oracle_scores(variant: Variant, t: &Tiny, cfg: &FitConfig, x: &[f64]) -> Vec<f64> {
    let n = t.rows.len() as f64;
    let d = t.rows[0].len();
    (0..t.classes)
        .map(|c| {
            let rows = class_rows(t, c);
            let nc = rows.len() as f64;
            let mut score = (nc / n).ln();
            match variant {
                Variant::Gaussian => {
                    let max_var = (0..d)
                        .map(|j| population_variance(&t.rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
                        .fold(0.0, f64::max);
                    let floor = if max_var > 0.0 {
                        cfg.var_epsilon * max_var
                    } else {
                        cfg.var_epsilon
                    };
                    for j in 0..d {
                        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                        let mu = col.iter().sum::<f64>() / nc;
                        let var = population_variance(&col) + floor;
                        score += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x[j] - mu).powi(2) / (2.0 * var);
                    }
                }
                Variant::Multinomial => {
                    let sums: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
                    let total: f64 = sums.iter().sum();
                    for j in 0..d {
                        let p = (sums[j] + cfg.alpha) / (total + cfg.alpha * d as f64);
                        score += p.powf(x[j]).ln();
                    }
                }
                Variant::Bernoulli => {
                    for j in 0..d {
                        let on = rows.iter().filter(|r| r[j] == 1.0).count() as f64;
                        let p = (on + 1.0) / (nc + 2.0);
                        score += (p.powf(x[j]) * (1.0 - p).powf(1.0 - x[j])).ln();
                    }
                }
            }
            score
        })
        .collect()
}

/// Literal interpretation of the Bernoulli train/apply pseudocode over
/// documents represented as sets of present term indices.
pub struct BernoulliTrace {
    pub vocabulary: Vec<usize>,
    pub prior: Vec<f64>,
    /// `condprob[t][c]`.
    pub condprob: Vec<Vec<f64>>,
}

pub fn train_bernoulli_nb(classes: usize, docs: &[(BTreeSet<usize>, usize)], vocabulary_size: usize) -> BernoulliTrace {
    let vocabulary: Vec<usize> = (0..vocabulary_size).collect();
    let n = docs.len();
    let mut prior = vec![0.0; classes];
    let mut condprob = vec![vec![0.0; classes]; vocabulary_size];
    for c in 0..classes {
        let n_c = docs.iter().filter(|(_, l)| *l == c).count();
        prior[c] = n_c as f64 / n as f64;
        for &t in &vocabulary {
            let n_ct = docs.iter().filter(|(terms, l)| *l == c && terms.contains(&t)).count();
            condprob[t][c] = (n_ct as f64 + 1.0) / (n_c as f64 + 2.0);
        }
    }
    BernoulliTrace {
        vocabulary,
        prior,
        condprob,
    }
}

#[allow(clippy::needless_range_loop)]
pub fn apply_bernoulli_nb(model: &BernoulliTrace, doc: &BTreeSet<usize>) -> (usize, Vec<f64>) {
    let classes = model.prior.len();
    let mut score = vec![0.0; classes];
    for c in 0..classes {
        score[c] = model.prior[c].ln();
        for &t in &model.vocabulary {
            if doc.contains(&t) {
                score[c] += model.condprob[t][c].ln();
            } else {
                score[c] += (1.0 - model.condprob[t][c]).ln();
            }
        }
    }
    let mut best = 0;
    for c in 1..classes {
        if score[c] > score[best] {
            best = c;
        }
    }
    (best, score)
}

pub fn terms(row: &[f64]) -> BTreeSet<usize> {
    row.iter()
        .enumerate()
        .filter(|(_, &v)| v == 1.0)
        .map(|(i, _)| i)
        .collect()
}

/// Composite Simpson's rule with `intervals` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Pearson's statistic over a full table, no cells dropped.
pub fn chi_square_direct(observed: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = observed.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..observed[0].len())
        .map(|j| observed.iter().map(|r| r[j]).sum())
        .collect();
    let total: f64 = rows.iter().sum();
    let mut chi = 0.0;
    for (i, r) in observed.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            chi += (o - e) * (o - e) / e;
        }
    }
    chi
}
