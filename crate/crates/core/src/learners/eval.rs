use serde::{Deserialize, Serialize};

use super::TrainedModel;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::Scalar;

/// Rows are predicted classes, columns actual classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<Label>,
    pub counts: Vec<Vec<u64>>,
    /// `counts / total`.
    pub normalized: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn from_labels(predicted: &[Label], actual: &[Label]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::DimensionMismatch {
                expected: actual.len(),
                actual: predicted.len(),
            });
        }
        if actual.is_empty() {
            return Err(Error::invalid_data("cannot build a confusion matrix from zero rows"));
        }
        let mut classes: Vec<Label> = predicted.iter().chain(actual).copied().collect();
        classes.sort_unstable();
        classes.dedup();
        let k = classes.len();
        let pos = |l: &Label| classes.binary_search(l).expect("collected above");
        let mut counts = vec![vec![0u64; k]; k];
        for (p, a) in predicted.iter().zip(actual) {
            counts[pos(p)][pos(a)] += 1;
        }
        let total = actual.len() as f64;
        let normalized = counts
            .iter()
            .map(|r| r.iter().map(|&c| c as f64 / total).collect())
            .collect();
        Ok(Self {
            classes,
            counts,
            normalized,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let diag: u64 = (0..self.classes.len()).map(|i| self.counts[i][i]).sum();
        diag as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalEntry {
    pub family: String,
    /// `"all"` or `"selected"`.
    pub feature_set: String,
    pub n_features: usize,
    pub accuracy: f64,
    /// Fastest of the timed prediction passes over the test rows.
    pub predict_seconds: f64,
    pub confusion: ConfusionMatrix,
}

/// Predicts `test` `repeats` times (at least once) and keeps the fastest time.
pub fn evaluate<T: Scalar>(model: &TrainedModel<T>, test: &FeatureMatrix<T>, feature_set: &str, repeats: usize) -> Result<EvalEntry> {
    if test.is_empty() {
        return Err(Error::invalid_data("cannot evaluate on an empty test matrix"));
    }
    let first = model.predict(test)?;
    let mut best = first.elapsed_s;
    for _ in 1..repeats.max(1) {
        best = best.min(model.predict(test)?.elapsed_s);
    }
    let confusion = ConfusionMatrix::from_labels(&first.labels, test.labels())?;
    Ok(EvalEntry {
        family: model.family().to_string(),
        feature_set: feature_set.to_string(),
        n_features: test.n_features(),
        accuracy: confusion.accuracy(),
        predict_seconds: best,
        confusion,
    })
}
