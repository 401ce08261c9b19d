use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Per-feature z-score parameters, frozen on the training partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    /// Population standard deviation as measured on the training data.
    pub std: Vec<f64>,
    /// Features whose spread is zero; they are centred but not scaled.
    pub zero_variance: Vec<bool>,
}

impl StandardizationStats {
    fn scale(&self, j: usize) -> f64 {
        if self.zero_variance[j] {
            1.0
        } else {
            self.std[j]
        }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| (v - self.mean[j]) / self.scale(j))
            .collect()
    }
}

pub fn fit_standardizer(train: &Dataset) -> Result<StandardizationStats> {
    if train.is_empty() {
        return Err(Error::Empty("cannot standardize an empty dataset".into()));
    }
    let n = train.len() as f64;
    let d = train.n_features();
    let mut mean = vec![0.0; d];
    for row in train.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for row in train.rows() {
        for j in 0..d {
            let z = row[j] - mean[j];
            var[j] += z * z;
        }
    }
    let std: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();
    let zero_variance = std
        .iter()
        .zip(&mean)
        .map(|(s, m)| *s <= 1e-12 * (1.0 + m.abs()))
        .collect();
    Ok(StandardizationStats {
        mean,
        std,
        zero_variance,
    })
}

pub fn apply_standardizer(stats: &StandardizationStats, ds: &Dataset) -> Result<Dataset> {
    if stats.mean.len() != ds.n_features() {
        return Err(Error::Dimension {
            expected: stats.mean.len(),
            got: ds.n_features(),
        });
    }
    Ok(ds.map_features(|j, v| (v - stats.mean[j]) / stats.scale(j)))
}
