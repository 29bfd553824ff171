use serde::{Deserialize, Serialize};

use super::Normalizer;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{evaluate, fit, stratified_indices, ClassifierParams, ClassifierSpec, GbtParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_features: usize,
    pub accuracy: f64,
}

/// Test accuracy of the gradient-boosted classifier on the top `count` ranked
/// features, for each count, with one fixed stratified split.
pub fn accuracy_vs_feature_count<T: Scalar>(
    m: &FeatureMatrix<T>,
    ranking: &[String],
    params: &GbtParams,
    counts: &[usize],
    test_fraction: f64,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if let Some(&c) = counts.iter().find(|&&c| c < 1 || c > ranking.len()) {
        return Err(Error::invalid_arg(format!("feature count {c} outside [1, {}]", ranking.len())));
    }
    let s = stratified_indices(m.labels(), test_fraction, seed)?;
    let spec = ClassifierSpec::new(ClassifierParams::Gbt(params.clone()), seed);
    counts
        .iter()
        .map(|&c| {
            let sub = m.select_columns(&ranking[..c])?;
            let (tr, te) = (sub.subset_rows(&s.train), sub.subset_rows(&s.test));
            let norm = Normalizer::fit(&tr)?;
            let model = fit(&spec, &norm.apply(&tr)?)?;
            let e = evaluate(&model, &norm.apply(&te)?, "sweep", 1)?;
            Ok(SweepPoint {
                n_features: c,
                accuracy: e.accuracy,
            })
        })
        .collect()
}
