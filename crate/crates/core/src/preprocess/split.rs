use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PreprocessError;
use crate::dataset::CleanDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.3,
            seed: 42,
            stratified: true,
        }
    }
}

/// Size of the test share of `n` rows; at least one row on each side when `n >= 2`.
fn test_count(n: usize, fraction: f64) -> usize {
    let k = (n as f64 * fraction).round() as usize;
    if n >= 2 {
        k.clamp(1, n - 1)
    } else {
        k.min(n)
    }
}

/// Seeded train/test partition of row indices, both returned in ascending order.
///
/// Stratified mode shuffles each class separately (in class-id order, from one
/// ChaCha8 stream) and sends `round(n_c × test_fraction)` rows of each class to
/// the test side, clamped so every class lands in both partitions.
pub fn split_indices(
    labels: &[usize],
    class_names: &[String],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>), PreprocessError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(PreprocessError::InvalidSplit(format!(
            "test_fraction must be in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); class_names.len()];
        for (i, &l) in labels.iter().enumerate() {
            by_class[l].push(i);
        }
        for (c, rows) in by_class.iter_mut().enumerate() {
            match rows.len() {
                0 => continue,
                1 => {
                    return Err(PreprocessError::ClassTooSmall {
                        class: class_names[c].clone(),
                        rows: 1,
                    })
                }
                n => {
                    rows.shuffle(&mut rng);
                    let k = test_count(n, spec.test_fraction);
                    test.extend_from_slice(&rows[..k]);
                    train.extend_from_slice(&rows[k..]);
                }
            }
        }
    } else {
        let mut rows: Vec<usize> = (0..labels.len()).collect();
        rows.shuffle(&mut rng);
        let k = test_count(rows.len(), spec.test_fraction);
        test.extend_from_slice(&rows[..k]);
        train.extend_from_slice(&rows[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(
    data: &CleanDataset,
    spec: &SplitSpec,
) -> Result<(CleanDataset, CleanDataset), PreprocessError> {
    let (train, test) = split_indices(data.labels(), data.class_names(), spec)?;
    Ok((data.select_rows(&train), data.select_rows(&test)))
}
