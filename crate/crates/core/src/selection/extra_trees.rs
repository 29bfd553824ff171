use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{gini, ClassIndex};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtraTreesParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `round(sqrt(n_features))`.
    pub k_features: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for ExtraTreesParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            k_features: None,
            min_samples_split: 2,
        }
    }
}

impl ExtraTreesParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid_arg("extra trees n_trees must be >= 1"));
        }
        if self.k_features == Some(0) {
            return Err(Error::invalid_arg("extra trees k_features must be >= 1"));
        }
        if self.min_samples_split < 2 {
            return Err(Error::invalid_arg("extra trees min_samples_split must be >= 2"));
        }
        Ok(())
    }

    pub fn k_for(&self, n_features: usize) -> usize {
        self.k_features
            .unwrap_or_else(|| ((n_features as f64).sqrt().round() as usize).max(1))
            .min(n_features)
    }
}

struct Grower<'a, T> {
    cols: &'a [Vec<T>],
    y: &'a [usize],
    n_classes: usize,
    k: usize,
    min_split: usize,
    n_total: f64,
    importance: Vec<f64>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Grower<'_, T> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn grow(&mut self, idx: Vec<usize>) {
        let n = idx.len();
        let counts = self.counts(&idx);
        let parent = gini(&counts, n);
        if parent <= 0.0 || n < self.min_split {
            return;
        }
        let d = self.cols.len();
        let mut order: Vec<usize> = (0..d).collect();
        let mut drawn = 0;
        let mut tried = 0;
        let mut best: Option<(f64, usize, T)> = None;
        while drawn < self.k && tried < d {
            let j = self.rng.random_range(tried..d);
            order.swap(tried, j);
            let f = order[tried];
            tried += 1;
            let col = &self.cols[f];
            let (lo, hi) = idx
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| (lo.min(col[i]), hi.max(col[i])));
            if lo >= hi {
                continue;
            }
            drawn += 1;
            let u: f64 = self.rng.random();
            let mut cut = lo + T::lit(u) * (hi - lo);
            if cut >= hi {
                cut = lo;
            }
            let mut left = vec![0usize; self.n_classes];
            let mut nl = 0;
            for &i in &idx {
                if col[i] <= cut {
                    left[self.y[i]] += 1;
                    nl += 1;
                }
            }
            let right: Vec<usize> = counts.iter().zip(&left).map(|(a, b)| a - b).collect();
            let nr = n - nl;
            let child = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
            if best.is_none_or(|(b, _, _)| child < b) {
                best = Some((child, f, cut));
            }
        }
        let Some((child, f, cut)) = best else {
            return;
        };
        self.importance[f] += n as f64 / self.n_total * (parent - child);
        let col = &self.cols[f];
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| col[i] <= cut);
        self.grow(l);
        self.grow(r);
    }
}

/// Mean decrease in Gini impurity over an ensemble of extremely randomized
/// trees, normalized to sum 1. Tree `t` draws from stream `t` of the seeded
/// generator, so the result does not depend on thread scheduling.
pub fn extra_trees_importance<T: Scalar>(m: &FeatureMatrix<T>, params: &ExtraTreesParams, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let classes = ClassIndex::fit(m.labels())?;
    let y = classes.encode(m.labels());
    let d = m.n_features();
    let cols: Vec<Vec<T>> = (0..d).map(|j| m.column(j)).collect();
    let k = params.k_for(d);
    let per_tree: Vec<Vec<f64>> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut g = Grower {
                cols: &cols,
                y: &y,
                n_classes: classes.len(),
                k,
                min_split: params.min_samples_split,
                n_total: m.n_rows() as f64,
                importance: vec![0.0; d],
                rng,
            };
            g.grow((0..m.n_rows()).collect());
            g.importance
        })
        .collect();
    let mut imp = vec![0.0; d];
    for t in &per_tree {
        for (a, &v) in imp.iter_mut().zip(t) {
            *a += v;
        }
    }
    let total: f64 = imp.iter().sum();
    if total > 0.0 {
        imp.iter_mut().for_each(|v| *v /= total);
    }
    Ok(imp)
}
