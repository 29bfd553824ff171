use serde::{Deserialize, Serialize};

use super::common::{majority, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid_arg("knn k must be >= 1"));
        }
        Ok(())
    }
}

/// k-nearest neighbours, Euclidean distance, majority vote.
///
/// Neighbours are ordered by (distance, class) so equidistant points resolve
/// toward the smaller label; vote ties also go to the smaller label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Knn<T> {
    k: usize,
    classes: ClassIndex,
    n_features: usize,
    points: Vec<T>,
    targets: Vec<usize>,
}

impl<T: Scalar> Knn<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &KnnParams) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let n_features = x[0].len();
        Ok(Self {
            k: params.k,
            targets: classes.encode(labels),
            classes,
            n_features,
            points: x.iter().flatten().copied().collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        let d = self.n_features;
        let mut dist: Vec<(T, usize)> = self
            .points
            .chunks_exact(d)
            .zip(&self.targets)
            .map(|(p, &c)| {
                let s = p.iter().zip(row).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
                (s, c)
            })
            .collect();
        let k = self.k.min(dist.len());
        let cmp = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        let mut votes = vec![0usize; self.classes.len()];
        for &(_, c) in &dist[..k] {
            votes[c] += 1;
        }
        self.classes.label(majority(&votes))
    }
}
