use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::common::{argmax, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: 64,
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            epochs: 200,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::invalid_arg("mlp hidden, batch_size and epochs must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid_arg("mlp learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid_arg("mlp momentum must be in [0, 1)"));
        }
        Ok(())
    }
}

/// Layer sizes of a one-hidden-layer ReLU network with softmax output.
///
/// Parameters live in one flat vector: `w1 (hidden x inputs)`, `b1`,
/// `w2 (classes x hidden)`, `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpShape {
    pub inputs: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl MlpShape {
    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + self.hidden + self.classes * self.hidden + self.classes
    }

    fn offsets(&self) -> [usize; 3] {
        let b1 = self.hidden * self.inputs;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.classes * self.hidden;
        [b1, w2, b2]
    }

    /// He-normal weights, zero biases.
    pub fn init<T: Scalar>(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        let [b1, w2, b2] = self.offsets();
        let mut p = vec![T::zero(); self.n_params()];
        let s1 = (2.0 / self.inputs as f64).sqrt();
        let s2 = (2.0 / self.hidden as f64).sqrt();
        for v in &mut p[..b1] {
            let z: f64 = StandardNormal.sample(rng);
            *v = T::lit(z * s1);
        }
        for v in &mut p[w2..b2] {
            let z: f64 = StandardNormal.sample(rng);
            *v = T::lit(z * s2);
        }
        p
    }

    /// Hidden pre-activations and class probabilities for one row.
    fn forward<T: Scalar>(&self, p: &[T], x: &[T], z1: &mut [T], prob: &mut [T]) {
        let [b1, w2, b2] = self.offsets();
        for (j, z) in z1.iter_mut().enumerate() {
            let w = &p[j * self.inputs..(j + 1) * self.inputs];
            *z = p[b1 + j] + w.iter().zip(x).map(|(&a, &b)| a * b).sum::<T>();
        }
        for (k, o) in prob.iter_mut().enumerate() {
            let w = &p[w2 + k * self.hidden..w2 + (k + 1) * self.hidden];
            *o = p[b2 + k] + w.iter().zip(z1.iter()).map(|(&a, &z)| a * z.max(T::zero())).sum::<T>();
        }
        let max = prob.iter().copied().fold(T::neg_infinity(), T::max);
        let mut s = T::zero();
        for o in prob.iter_mut() {
            *o = (*o - max).exp();
            s += *o;
        }
        prob.iter_mut().for_each(|o| *o /= s);
    }

    /// Mean cross-entropy over `rows` and its gradient with respect to `p`.
    /// `x` is row-major with `inputs` columns; `y` holds class indices.
    pub fn loss_and_gradient<T: Scalar>(&self, p: &[T], x: &[T], y: &[usize], rows: &[usize], grad: &mut [T]) -> T {
        let [b1, w2, b2] = self.offsets();
        grad.iter_mut().for_each(|g| *g = T::zero());
        let mut z1 = vec![T::zero(); self.hidden];
        let mut prob = vec![T::zero(); self.classes];
        let mut dz1 = vec![T::zero(); self.hidden];
        let tiny = T::min_positive_value();
        let mut loss = T::zero();
        for &i in rows {
            let xi = &x[i * self.inputs..(i + 1) * self.inputs];
            self.forward(p, xi, &mut z1, &mut prob);
            loss -= prob[y[i]].max(tiny).ln();
            prob[y[i]] -= T::one();
            dz1.iter_mut().for_each(|v| *v = T::zero());
            for (k, &dk) in prob.iter().enumerate() {
                grad[b2 + k] += dk;
                let base = w2 + k * self.hidden;
                for j in 0..self.hidden {
                    grad[base + j] += dk * z1[j].max(T::zero());
                    dz1[j] += dk * p[base + j];
                }
            }
            for j in 0..self.hidden {
                if z1[j] <= T::zero() {
                    continue;
                }
                let d = dz1[j];
                grad[b1 + j] += d;
                for (g, &v) in grad[j * self.inputs..(j + 1) * self.inputs].iter_mut().zip(xi) {
                    *g += d * v;
                }
            }
        }
        let n = T::from_count(rows.len());
        grad.iter_mut().for_each(|g| *g /= n);
        loss / n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Mlp<T> {
    classes: ClassIndex,
    shape: MlpShape,
    params: Vec<T>,
}

impl<T: Scalar> Mlp<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &MlpParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let y = classes.encode(labels);
        let shape = MlpShape {
            inputs: x[0].len(),
            hidden: params.hidden,
            classes: classes.len(),
        };
        let flat: Vec<T> = x.iter().flatten().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<T> = shape.init(&mut rng);
        let mut velocity = vec![T::zero(); p.len()];
        let mut grad = vec![T::zero(); p.len()];
        let lr = T::lit(params.learning_rate);
        let mu = T::lit(params.momentum);
        let mut order: Vec<usize> = (0..x.len()).collect();
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(params.batch_size) {
                shape.loss_and_gradient(&p, &flat, &y, batch, &mut grad);
                for ((w, v), &g) in p.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                    *v = mu * *v - lr * g;
                    *w += *v;
                }
            }
        }
        Ok(Self { classes, shape, params: p })
    }

    pub fn n_features(&self) -> usize {
        self.shape.inputs
    }

    pub fn shape(&self) -> MlpShape {
        self.shape
    }

    pub fn predict_proba_row(&self, row: &[T]) -> Vec<T> {
        let mut z1 = vec![T::zero(); self.shape.hidden];
        let mut prob = vec![T::zero(); self.shape.classes];
        self.shape.forward(&self.params, row, &mut z1, &mut prob);
        prob
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        self.classes.label(argmax(&self.predict_proba_row(row)))
    }
}
