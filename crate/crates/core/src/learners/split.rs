use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Label};
use crate::scalar::Scalar;

/// Row indices of a train/test partition, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// How a split was drawn, recorded in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDescription {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
    pub n_train: usize,
    pub n_test: usize,
}

/// Stratified partition: each class contributes `round(n_c * test_fraction)`
/// test rows (at least one, leaving at least one for training).
pub fn stratified_indices(labels: &[Label], test_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid_arg(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        return Err(Error::invalid_data("cannot split an empty matrix"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if idx.len() < 2 {
            return Err(Error::invalid_data(format!(
                "class {c} has {} row(s); stratified split needs at least 2",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

/// Stratified train/test split of a feature matrix.
pub fn split<T: Scalar>(m: &FeatureMatrix<T>, test_fraction: f64, seed: u64) -> Result<(FeatureMatrix<T>, FeatureMatrix<T>)> {
    let s = stratified_indices(m.labels(), test_fraction, seed)?;
    Ok((m.subset_rows(&s.train), m.subset_rows(&s.test)))
}
