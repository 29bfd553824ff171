use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{argmax, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearSvmParams {
    pub c: f64,
    pub passes: usize,
}

impl Default for LinearSvmParams {
    fn default() -> Self {
        Self { c: 1.0, passes: 1000 }
    }
}

impl LinearSvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid_arg("svm C must be positive"));
        }
        if self.passes == 0 {
            return Err(Error::invalid_arg("svm passes must be >= 1"));
        }
        Ok(())
    }
}

/// One-vs-rest linear SVM trained by full-batch subgradient descent on
/// `lambda/2 |w|^2 + mean(hinge)`, with `lambda = 1 / (C n)` and step `1/sqrt(t)`.
/// The iterate with the lowest objective is kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearSvm<T> {
    classes: ClassIndex,
    n_features: usize,
    /// Per class: `n_features` weights followed by the bias.
    weights: Vec<Vec<T>>,
}

fn objective<T: Scalar>(w: &[T], x: &[T], y: &[T], lambda: T, margins: &mut [T]) -> T {
    let d1 = w.len();
    let mut hinge = T::zero();
    for ((row, &yi), m) in x.chunks_exact(d1).zip(y).zip(margins.iter_mut()) {
        *m = yi * row.iter().zip(w).map(|(&a, &b)| a * b).sum::<T>();
        hinge += (T::one() - *m).max(T::zero());
    }
    let norm: T = w.iter().map(|&v| v * v).sum();
    lambda * norm / T::lit(2.0) + hinge / T::from_count(y.len())
}

fn train_binary<T: Scalar>(x: &[T], y: &[T], d1: usize, lambda: T, passes: usize) -> Vec<T> {
    let n = y.len();
    let inv_n = T::one() / T::from_count(n);
    let mut w = vec![T::zero(); d1];
    let mut margins = vec![T::zero(); n];
    let mut best = w.clone();
    let mut best_obj = objective(&w, x, y, lambda, &mut margins);
    let mut grad = vec![T::zero(); d1];
    for t in 1..=passes {
        for (g, &wi) in grad.iter_mut().zip(&w) {
            *g = lambda * wi;
        }
        for ((row, &yi), &m) in x.chunks_exact(d1).zip(y).zip(&margins) {
            if m < T::one() {
                let s = yi * inv_n;
                for (g, &v) in grad.iter_mut().zip(row) {
                    *g -= s * v;
                }
            }
        }
        let eta = T::one() / T::from_count(t).sqrt();
        for (wi, &g) in w.iter_mut().zip(&grad) {
            *wi -= eta * g;
        }
        let obj = objective(&w, x, y, lambda, &mut margins);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&w);
        }
    }
    best
}

impl<T: Scalar> LinearSvm<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &LinearSvmParams) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let y = classes.encode(labels);
        let n_features = x[0].len();
        let d1 = n_features + 1;
        let mut flat = Vec::with_capacity(x.len() * d1);
        for r in x {
            flat.extend_from_slice(r);
            flat.push(T::one());
        }
        let lambda = T::lit(1.0 / (params.c * x.len() as f64));
        let weights = (0..classes.len())
            .into_par_iter()
            .map(|c| {
                let yc: Vec<T> = y.iter().map(|&k| if k == c { T::one() } else { -T::one() }).collect();
                train_binary(&flat, &yc, d1, lambda, params.passes)
            })
            .collect();
        Ok(Self {
            classes,
            n_features,
            weights,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn decision_function(&self, row: &[T]) -> Vec<T> {
        self.weights
            .iter()
            .map(|w| row.iter().zip(w).map(|(&a, &b)| a * b).sum::<T>() + w[self.n_features])
            .collect()
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        self.classes.label(argmax(&self.decision_function(row)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_three_clusters() {
        let centers = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (k, &(cx, cy)) in centers.iter().enumerate() {
            for i in 0..30 {
                let a = i as f64 * 0.7;
                x.push(vec![cx + 0.1 * a.sin(), cy + 0.1 * a.cos()]);
                y.push(k as Label + 1);
            }
        }
        let m = LinearSvm::fit(&x, &y, &LinearSvmParams::default()).unwrap();
        let acc = x.iter().zip(&y).filter(|(r, &l)| m.predict_row(r) == l).count();
        assert_eq!(acc, x.len());
    }

    #[test]
    fn best_iterate_never_worse_than_zero() {
        let x = vec![vec![1.0f64], vec![2.0], vec![-1.0], vec![-2.0]];
        let y = [1.0, 1.0, -1.0, -1.0];
        let flat: Vec<f64> = x.iter().flat_map(|r| [r[0], 1.0]).collect();
        let lambda = 0.25;
        let w = train_binary(&flat, &y, 2, lambda, 50);
        let mut m = vec![0.0; 4];
        assert!(objective(&w, &flat, &y, lambda, &mut m) <= objective(&[0.0, 0.0], &flat, &y, lambda, &mut m));
        assert!(w[0] > 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = LinearSvmParams { c: 0.0, passes: 10 };
        assert!(LinearSvm::fit(&[vec![0.0f64], vec![1.0]], &[1, 2], &p).is_err());
    }
}
