use serde::{Deserialize, Serialize};

use super::common::{argmax, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianNbParams {
    pub var_floor: f64,
}

impl Default for GaussianNbParams {
    fn default() -> Self {
        Self { var_floor: 1e-9 }
    }
}

impl GaussianNbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.var_floor > 0.0 && self.var_floor.is_finite()) {
            return Err(Error::invalid_arg("var_floor must be positive"));
        }
        Ok(())
    }
}

/// Gaussian naive Bayes with per-class diagonal variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaussianNb<T> {
    classes: ClassIndex,
    log_prior: Vec<T>,
    means: Vec<Vec<T>>,
    vars: Vec<Vec<T>>,
}

impl<T: Scalar> GaussianNb<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &GaussianNbParams) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let y = classes.encode(labels);
        let d = x[0].len();
        let k = classes.len();
        let mut counts = vec![0usize; k];
        let mut means = vec![vec![T::zero(); d]; k];
        for (row, &c) in x.iter().zip(&y) {
            counts[c] += 1;
            for (m, &v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        for (m, &n) in means.iter_mut().zip(&counts) {
            let n = T::from_count(n);
            m.iter_mut().for_each(|v| *v /= n);
        }
        let mut vars = vec![vec![T::zero(); d]; k];
        for (row, &c) in x.iter().zip(&y) {
            for j in 0..d {
                let e = row[j] - means[c][j];
                vars[c][j] += e * e;
            }
        }
        let floor = T::lit(params.var_floor);
        for (v, &n) in vars.iter_mut().zip(&counts) {
            let n = T::from_count(n);
            v.iter_mut().for_each(|s| *s = (*s / n).max(floor));
        }
        let total = T::from_count(x.len());
        let log_prior = counts.iter().map(|&n| (T::from_count(n) / total).ln()).collect();
        Ok(Self {
            classes,
            log_prior,
            means,
            vars,
        })
    }

    pub fn n_features(&self) -> usize {
        self.means[0].len()
    }

    pub fn classes(&self) -> &[Label] {
        self.classes.classes()
    }

    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, row: &[T]) -> Vec<T> {
        let half = T::lit(0.5);
        let ln_2pi = T::lit((2.0 * std::f64::consts::PI).ln());
        (0..self.classes.len())
            .map(|c| {
                let mut s = self.log_prior[c];
                for ((&x, &mean), &var) in row.iter().zip(&self.means[c]).zip(&self.vars[c]) {
                    let e = x - mean;
                    s -= half * (ln_2pi + var.ln() + e * e / var);
                }
                s
            })
            .collect()
    }

    /// Posterior probabilities (sum to one).
    pub fn predict_proba_row(&self, row: &[T]) -> Vec<T> {
        let jll = self.joint_log_likelihood(row);
        let max = jll.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = jll.iter().map(|&v| (v - max).exp()).collect();
        let z: T = exps.iter().copied().sum();
        exps.into_iter().map(|e| e / z).collect()
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        self.classes.label(argmax(&self.joint_log_likelihood(row)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn posterior_rows_sum_to_one() {
        let x = vec![vec![0.0f64, 1.0], vec![0.5, 0.2], vec![3.0, 3.0], vec![2.5, 4.0], vec![9.0, -1.0], vec![8.0, 0.0]];
        let y = vec![1, 1, 2, 2, 3, 3];
        let nb = GaussianNb::fit(&x, &y, &GaussianNbParams::default()).unwrap();
        for r in [[0.1, 0.1], [50.0, -20.0], [2.0, 2.0]] {
            let p = nb.predict_proba_row(&r);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(nb.predict_row(&[2.8, 3.5]), 2);
    }

    #[test]
    fn zero_variance_feature_is_floored() {
        let x = vec![vec![1.0f64], vec![1.0], vec![2.0], vec![2.0]];
        let nb = GaussianNb::fit(&x, &[1, 1, 2, 2], &GaussianNbParams::default()).unwrap();
        assert_eq!(nb.predict_row(&[1.0]), 1);
        assert!(nb.predict_proba_row(&[1.4]).iter().all(|p| p.is_finite()));
    }

    #[test]
    fn two_gaussian_boundary_near_midpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (Normal::new(0.0, 1.0).unwrap(), Normal::new(4.0, 1.0).unwrap());
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..500 {
            x.push(vec![a.sample(&mut rng)]);
            y.push(1);
            x.push(vec![b.sample(&mut rng)]);
            y.push(2);
        }
        let nb = GaussianNb::fit(&x, &y, &GaussianNbParams::default()).unwrap();
        let boundary = (0..=4000)
            .map(|i| i as f64 / 1000.0)
            .find(|&v| nb.predict_row(&[v]) == 2)
            .unwrap();
        assert!((boundary - 2.0).abs() < 0.2, "{boundary}");
    }
}
