use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::scalar::Scalar;

/// Mean normalization `(x - mean) / (max - min)` with statistics from training rows.
/// A zero range maps every value to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Normalizer<T> {
    pub names: Vec<String>,
    pub mean: Vec<T>,
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Scalar> Normalizer<T> {
    pub fn fit(train: &FeatureMatrix<T>) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::invalid_data("cannot fit a normalizer on an empty matrix"));
        }
        let d = train.n_features();
        let mut sum = vec![T::zero(); d];
        let mut min = vec![T::infinity(); d];
        let mut max = vec![T::neg_infinity(); d];
        for r in train.rows() {
            for j in 0..d {
                sum[j] += r[j];
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        let n = T::from_count(train.n_rows());
        Ok(Self {
            names: train.names().to_vec(),
            mean: sum.into_iter().map(|s| s / n).collect(),
            min,
            max,
        })
    }

    pub fn apply(&self, m: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        if m.names() != self.names.as_slice() {
            return Err(Error::invalid_data("normalizer applied to a matrix with different columns"));
        }
        Ok(m.map_values(|j, v| {
            let range = self.max[j] - self.min[j];
            if range > T::zero() {
                (v - self.mean[j]) / range
            } else {
                T::zero()
            }
        }))
    }
}
