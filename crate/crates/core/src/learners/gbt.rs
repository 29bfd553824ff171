//! Histogram gradient-boosted trees with a softmax objective.
//!
//! Each round fits one regression tree per class on the Newton statistics
//! `g = p - y`, `h = p (1 - p)` of the multinomial log-loss. Splits maximize
//! `GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)`; for the first round this is the
//! Gini decrease of the one-vs-rest indicator up to a constant factor.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::{argmax, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
    pub max_bins: usize,
    /// Row fraction drawn (without replacement) for each round.
    pub subsample: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
            lambda: 1.0,
            min_child_weight: 1.0,
            max_bins: 64,
            subsample: 1.0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.max_depth == 0 {
            return Err(Error::invalid_arg("gbt rounds and max_depth must be >= 1"));
        }
        if !(2..=256).contains(&self.max_bins) {
            return Err(Error::invalid_arg("gbt max_bins must be in [2, 256]"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid_arg("gbt learning_rate must be positive"));
        }
        if !(self.lambda >= 0.0 && self.min_child_weight >= 0.0) {
            return Err(Error::invalid_arg("gbt lambda and min_child_weight must be >= 0"));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::invalid_arg("gbt subsample must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum GbtNode<T> {
    Leaf {
        value: T,
    },
    /// Goes left when the binned value is `<= bin`, i.e. `x <= threshold`.
    Split {
        feature: usize,
        bin: u8,
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GbtTree<T> {
    nodes: Vec<GbtNode<T>>,
}

impl<T: Scalar> GbtTree<T> {
    fn eval(&self, bins: &[u8]) -> T {
        self.eval_with(|f| bins[f])
    }

    fn eval_with(&self, bin_of_feature: impl Fn(usize) -> u8) -> T {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                GbtNode::Leaf { value } => return value,
                GbtNode::Split { feature, bin, left, right, .. } => {
                    id = if bin_of_feature(feature) <= bin { left } else { right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[GbtNode<T>] {
        &self.nodes
    }
}

/// Cut points per feature; a value's bin is the number of cuts below it.
fn cut_points<T: Scalar>(col: &mut [T], max_bins: usize) -> Vec<T> {
    col.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
    let mut uniq: Vec<T> = Vec::with_capacity(col.len());
    for &v in col.iter() {
        if uniq.last() != Some(&v) {
            uniq.push(v);
        }
    }
    let half = T::lit(0.5);
    let mid = |a: T, b: T| {
        let m = (a + b) * half;
        if m >= b { a } else { m }
    };
    if uniq.len() <= max_bins {
        return uniq.windows(2).map(|w| mid(w[0], w[1])).collect();
    }
    let n = col.len();
    let mut cuts: Vec<T> = Vec::with_capacity(max_bins - 1);
    for q in 1..max_bins {
        let i = q * n / max_bins;
        let (a, b) = (col[i - 1], col[i]);
        if a < b {
            let c = mid(a, b);
            if cuts.last().is_none_or(|&l| l < c) {
                cuts.push(c);
            }
        }
    }
    cuts
}

fn bin_of<T: Scalar>(cuts: &[T], v: T) -> u8 {
    cuts.partition_point(|&c| c < v) as u8
}

struct TreeBuilder<'a, T> {
    binned: &'a [u8],
    n: usize,
    n_bins: &'a [usize],
    cuts: &'a [Vec<T>],
    grad: &'a [T],
    hess: &'a [T],
    params: &'a GbtParams,
    lambda: T,
    min_child: T,
    nodes: Vec<GbtNode<T>>,
    gain: Vec<T>,
}

impl<T: Scalar> TreeBuilder<'_, T> {
    fn score(&self, g: T, h: T) -> T {
        g * g / (h + self.lambda)
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let (g, h) = idx
            .iter()
            .fold((T::zero(), T::zero()), |(g, h), &i| (g + self.grad[i], h + self.hess[i]));
        let id = self.nodes.len();
        let value = -g / (h + self.lambda) * T::lit(self.params.learning_rate);
        self.nodes.push(GbtNode::Leaf { value });
        if depth >= self.params.max_depth || idx.len() < 2 {
            return id;
        }
        let parent = self.score(g, h);
        let mut best: Option<(T, usize, usize)> = None;
        let mut hist_g = Vec::new();
        let mut hist_h = Vec::new();
        for (f, &nb) in self.n_bins.iter().enumerate() {
            if nb < 2 {
                continue;
            }
            hist_g.clear();
            hist_g.resize(nb, T::zero());
            hist_h.clear();
            hist_h.resize(nb, T::zero());
            let col = &self.binned[f * self.n..(f + 1) * self.n];
            for &i in &idx {
                let b = col[i] as usize;
                hist_g[b] += self.grad[i];
                hist_h[b] += self.hess[i];
            }
            let (mut gl, mut hl) = (T::zero(), T::zero());
            for b in 0..nb - 1 {
                gl += hist_g[b];
                hl += hist_h[b];
                let (gr, hr) = (g - gl, h - hl);
                if hl < self.min_child || hr < self.min_child {
                    continue;
                }
                let gain = self.score(gl, hl) + self.score(gr, hr) - parent;
                if gain > T::zero() && best.is_none_or(|(bg, _, _)| gain > bg) {
                    best = Some((gain, f, b));
                }
            }
        }
        let Some((gain, feature, bin)) = best else {
            return id;
        };
        self.gain[feature] += gain;
        let col = &self.binned[feature * self.n..(feature + 1) * self.n];
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| col[i] as usize <= bin);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = GbtNode::Split {
            feature,
            bin: bin as u8,
            threshold: self.cuts[feature][bin],
            left,
            right,
        };
        id
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Gbt<T> {
    classes: ClassIndex,
    n_features: usize,
    cuts: Vec<Vec<T>>,
    /// `trees[round][class]`.
    trees: Vec<Vec<GbtTree<T>>>,
    /// Total split gain per feature, unnormalized.
    gain: Vec<T>,
}

impl<T: Scalar> Gbt<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &GbtParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let y = classes.encode(labels);
        let n = x.len();
        let d = x[0].len();
        let k = classes.len();
        let cuts: Vec<Vec<T>> = (0..d)
            .into_par_iter()
            .map(|f| {
                let mut col: Vec<T> = x.iter().map(|r| r[f]).collect();
                cut_points(&mut col, params.max_bins)
            })
            .collect();
        let n_bins: Vec<usize> = cuts.iter().map(|c| c.len() + 1).collect();
        let mut binned = vec![0u8; n * d];
        for f in 0..d {
            for (i, r) in x.iter().enumerate() {
                binned[f * n + i] = bin_of(&cuts[f], r[f]);
            }
        }
        let mut logits = vec![T::zero(); n * k];
        let mut trees = Vec::with_capacity(params.rounds);
        let mut gain = vec![T::zero(); d];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_sub = ((n as f64 * params.subsample).round() as usize).clamp(1, n);
        let hess_floor = T::lit(1e-16);
        for _ in 0..params.rounds {
            let rows: Vec<usize> = if n_sub == n {
                (0..n).collect()
            } else {
                let mut s = sample(&mut rng, n, n_sub).into_vec();
                s.sort_unstable();
                s
            };
            let mut prob = logits.clone();
            for p in prob.chunks_exact_mut(k) {
                softmax(p);
            }
            let built: Vec<(GbtTree<T>, Vec<T>)> = (0..k)
                .into_par_iter()
                .map(|c| {
                    let mut grad = vec![T::zero(); n];
                    let mut hess = vec![T::zero(); n];
                    for i in 0..n {
                        let p = prob[i * k + c];
                        let t = if y[i] == c { T::one() } else { T::zero() };
                        grad[i] = p - t;
                        hess[i] = (p * (T::one() - p)).max(hess_floor);
                    }
                    let mut b = TreeBuilder {
                        binned: &binned,
                        n,
                        n_bins: &n_bins,
                        cuts: &cuts,
                        grad: &grad,
                        hess: &hess,
                        params,
                        lambda: T::lit(params.lambda),
                        min_child: T::lit(params.min_child_weight),
                        nodes: Vec::new(),
                        gain: vec![T::zero(); d],
                    };
                    b.grow(rows.clone(), 0);
                    (GbtTree { nodes: b.nodes }, b.gain)
                })
                .collect();
            let mut round = Vec::with_capacity(k);
            for (c, (tree, g)) in built.into_iter().enumerate() {
                for (acc, v) in gain.iter_mut().zip(g) {
                    *acc += v;
                }
                for i in 0..n {
                    logits[i * k + c] += tree.eval_with(|f| binned[f * n + i]);
                }
                round.push(tree);
            }
            trees.push(round);
        }
        Ok(Self {
            classes,
            n_features: d,
            cuts,
            trees,
            gain,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> &[Vec<GbtTree<T>>] {
        &self.trees
    }

    /// Total split gain per feature normalized to sum 1 (all zero when no split was made).
    pub fn importance(&self) -> Vec<T> {
        let total: T = self.gain.iter().copied().sum();
        if total <= T::zero() {
            return vec![T::zero(); self.gain.len()];
        }
        self.gain.iter().map(|&g| g / total).collect()
    }

    pub fn raw_gain(&self) -> &[T] {
        &self.gain
    }

    fn logits(&self, row: &[T], bins: &mut [u8]) -> Vec<T> {
        for ((b, cuts), &v) in bins.iter_mut().zip(&self.cuts).zip(row) {
            *b = bin_of(cuts, v);
        }
        let mut out = vec![T::zero(); self.classes.len()];
        for round in &self.trees {
            for (o, t) in out.iter_mut().zip(round) {
                *o += t.eval(bins);
            }
        }
        out
    }

    pub fn predict_proba_row(&self, row: &[T]) -> Vec<T> {
        let mut bins = vec![0u8; self.n_features];
        let mut p = self.logits(row, &mut bins);
        softmax(&mut p);
        p
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        let mut bins = vec![0u8; self.n_features];
        self.classes.label(argmax(&self.logits(row, &mut bins)))
    }
}

fn softmax<T: Scalar>(v: &mut [T]) {
    let max = v.iter().copied().fold(T::neg_infinity(), T::max);
    let mut s = T::zero();
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        s += *x;
    }
    v.iter_mut().for_each(|x| *x /= s);
}
