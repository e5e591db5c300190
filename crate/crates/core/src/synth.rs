//! Seeded synthetic flow tables: one Gaussian cloud per class over features of
//! very different magnitudes, with optional injected defects (absent tokens and
//! negative values).

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

use crate::preprocess::DOS_CLASS_ORDER;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic dimensions: {0}")]
    InvalidDimensions(String),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub rows_per_class: usize,
    pub features: usize,
    pub classes: usize,
    pub seed: u64,
    /// Spread of class centres, in units of the within-class noise.
    pub separation: f64,
    /// Probability that any one feature cell is corrupted.
    pub defect_rate: f64,
    /// Of the corrupted cells, the share turned negative; the rest become absent tokens.
    pub negative_share: f64,
    pub label_column: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            rows_per_class: 2000,
            features: 20,
            classes: 6,
            seed: 42,
            separation: 0.5,
            defect_rate: 0.0,
            negative_share: 0.0,
            label_column: "Label".into(),
        }
    }
}

/// What a generation run actually injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SynthSummary {
    pub rows: usize,
    pub cells: usize,
    pub absent_cells: usize,
    pub negative_cells: usize,
}

const ABSENT_TOKENS: [&str; 4] = ["NaN", "", "Infinity", "-Infinity"];
const BASELINE: f64 = 6.0;

pub fn class_names(classes: usize) -> Vec<String> {
    if classes <= DOS_CLASS_ORDER.len() {
        DOS_CLASS_ORDER[..classes].iter().map(|s| s.to_string()).collect()
    } else {
        (0..classes).map(|c| format!("Class_{c}")).collect()
    }
}

pub fn feature_names(features: usize) -> Vec<String> {
    (0..features).map(|j| format!("Feature_{j:02}")).collect()
}

impl SynthConfig {
    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidDimensions(m));
        if self.features == 0 {
            return bad("features must be >= 1".into());
        }
        if self.classes == 0 {
            return bad("classes must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.defect_rate) {
            return bad(format!("defect_rate {} outside [0, 1]", self.defect_rate));
        }
        if !(0.0..=1.0).contains(&self.negative_share) {
            return bad(format!("negative_share {} outside [0, 1]", self.negative_share));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return bad(format!("separation {} must be finite and >= 0", self.separation));
        }
        Ok(())
    }
}

/// Writes the CSV to `out` and reports the injected defect counts.
///
/// Feature `j` has magnitude scale `10^u_j`, `u_j ~ U(0, 3)`. Class `c` draws
/// feature `j` as `scale_j · max(0, 6 + separation·z_cj + σ_cj·ε)` with
/// `z_cj, ε ~ N(0, 1)` and `σ_cj ~ U(0.5, 1.5)`. Rows are shuffled.
pub fn generate<W: Write>(config: &SynthConfig, out: W) -> Result<SynthSummary, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let d = config.features;
    let k = config.classes;

    let scales: Vec<f64> = (0..d).map(|_| 10f64.powf(rng.random_range(0.0..3.0))).collect();
    let centres: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            (0..d)
                .map(|_| BASELINE + config.separation * normal.sample(&mut rng))
                .collect()
        })
        .collect();
    let spread = Uniform::new(0.5, 1.5).expect("valid range");
    let sigmas: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| spread.sample(&mut rng)).collect())
        .collect();

    let mut rows: Vec<(usize, Vec<f64>)> = Vec::with_capacity(k * config.rows_per_class);
    for c in 0..k {
        for _ in 0..config.rows_per_class {
            let row = (0..d)
                .map(|j| scales[j] * (centres[c][j] + sigmas[c][j] * normal.sample(&mut rng)).max(0.0))
                .collect();
            rows.push((c, row));
        }
    }
    rows.shuffle(&mut rng);

    let names = class_names(k);
    let mut w = csv::Writer::from_writer(out);
    let mut header = feature_names(d);
    header.push(config.label_column.clone());
    w.write_record(&header).map_err(csv_io)?;

    let mut summary = SynthSummary {
        rows: rows.len(),
        cells: rows.len() * d,
        ..SynthSummary::default()
    };
    let mut record: Vec<String> = Vec::with_capacity(d + 1);
    for (c, row) in &rows {
        record.clear();
        for (j, &v) in row.iter().enumerate() {
            let cell = if config.defect_rate > 0.0 && rng.random_bool(config.defect_rate) {
                if rng.random_bool(config.negative_share) {
                    summary.negative_cells += 1;
                    format!("{:.6}", -scales[j] * rng.random_range(0.01..1.0))
                } else {
                    summary.absent_cells += 1;
                    ABSENT_TOKENS[rng.random_range(0..ABSENT_TOKENS.len())].to_string()
                }
            } else {
                format!("{v:.6}")
            };
            record.push(cell);
        }
        record.push(names[*c].clone());
        w.write_record(&record).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(summary)
}

fn csv_io(e: csv::Error) -> SynthError {
    SynthError::Io(std::io::Error::other(e))
}
