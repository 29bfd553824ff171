//! CART classification tree with exhaustive Gini splits.

use serde::{Deserialize, Serialize};

use super::common::{gini, majority, ClassIndex};
use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionTreeParams {
    pub min_samples_split: usize,
    /// Unlimited when `None`.
    pub max_depth: Option<usize>,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        Self {
            min_samples_split: 2,
            max_depth: None,
        }
    }
}

impl DecisionTreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::invalid_arg("min_samples_split must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub enum Node<T> {
    Leaf {
        class: usize,
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DecisionTree<T> {
    classes: ClassIndex,
    n_features: usize,
    nodes: Vec<Node<T>>,
}

struct Builder<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [usize],
    n_classes: usize,
    params: &'a DecisionTreeParams,
    nodes: Vec<Node<T>>,
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    impurity: f64,
}

impl<T: Scalar> Builder<'_, T> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn best_split(&self, idx: &[usize], parent: f64) -> Option<BestSplit<T>> {
        let n = idx.len();
        let n_features = self.x[idx[0]].len();
        let mut best: Option<BestSplit<T>> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for f in 0..n_features {
            order.sort_by(|&a, &b| self.x[a][f].partial_cmp(&self.x[b][f]).expect("finite features"));
            let mut left = vec![0usize; self.n_classes];
            let mut right = self.counts(idx);
            for pos in 0..n - 1 {
                let i = order[pos];
                left[self.y[i]] += 1;
                right[self.y[i]] -= 1;
                let (v, next) = (self.x[i][f], self.x[order[pos + 1]][f]);
                if v >= next {
                    continue;
                }
                let nl = pos + 1;
                let nr = n - nl;
                let imp = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
                if imp < parent && best.as_ref().is_none_or(|b| imp < b.impurity) {
                    let mut threshold = (v + next) / T::lit(2.0);
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        impurity: imp,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let n = idx.len();
        let impurity = gini(&counts, n);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: majority(&counts),
        });
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if impurity <= 0.0 || n < self.params.min_samples_split || !depth_ok {
            return id;
        }
        let Some(split) = self.best_split(&idx, impurity) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x[i][split.feature] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

impl<T: Scalar> DecisionTree<T> {
    pub fn fit(x: &[Vec<T>], labels: &[Label], params: &DecisionTreeParams) -> Result<Self> {
        params.validate()?;
        let classes = ClassIndex::fit(labels)?;
        let y = classes.encode(labels);
        let n_features = x[0].len();
        let mut b = Builder {
            x,
            y: &y,
            n_classes: classes.len(),
            params,
            nodes: Vec::new(),
        };
        b.grow((0..x.len()).collect(), 0);
        Ok(Self {
            nodes: b.nodes,
            classes,
            n_features,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn predict_row(&self, row: &[T]) -> Label {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { class } => return self.classes.label(*class),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Checks whether some axis-aligned threshold separates two classes perfectly.
    fn axis_separable(x: &[Vec<f64>], y: &[Label]) -> bool {
        (0..x[0].len()).any(|f| {
            let max_a = x.iter().zip(y).filter(|(_, &l)| l == 0).map(|(r, _)| r[f]).fold(f64::MIN, f64::max);
            let min_b = x.iter().zip(y).filter(|(_, &l)| l == 1).map(|(r, _)| r[f]).fold(f64::MAX, f64::min);
            let max_b = x.iter().zip(y).filter(|(_, &l)| l == 1).map(|(r, _)| r[f]).fold(f64::MIN, f64::max);
            let min_a = x.iter().zip(y).filter(|(_, &l)| l == 0).map(|(r, _)| r[f]).fold(f64::MAX, f64::min);
            max_a < min_b || max_b < min_a
        })
    }

    #[test]
    fn linearly_separated_2d_fits_perfectly() {
        // diagonal boundary x + y > 1 is not axis-aligned, so the tree needs several splits
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                let (a, b) = (i as f64 / 19.0, j as f64 / 19.0);
                if (a + b - 1.0).abs() < 0.03 {
                    continue;
                }
                x.push(vec![a, b]);
                y.push(Label::from(a + b > 1.0));
            }
        }
        assert!(!axis_separable(&x, &y));
        let t = DecisionTree::fit(&x, &y, &DecisionTreeParams::default()).unwrap();
        let acc = x.iter().zip(&y).filter(|(r, &l)| t.predict_row(r) == l).count();
        assert_eq!(acc, x.len());
    }

    #[test]
    fn constant_features_give_majority_leaf() {
        let x = vec![vec![1.0f64]; 5];
        let t = DecisionTree::fit(&x, &[2, 2, 3, 3, 3], &DecisionTreeParams::default()).unwrap();
        assert_eq!(t.n_nodes(), 1);
        assert_eq!(t.predict_row(&[1.0]), 3);
    }

    #[test]
    fn depth_limit_respected() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<Label> = (0..16).map(|i| (i % 2) as Label).collect();
        let p = DecisionTreeParams {
            min_samples_split: 2,
            max_depth: Some(1),
        };
        assert_eq!(DecisionTree::fit(&x, &y, &p).unwrap().n_nodes(), 3);
    }

    #[test]
    fn single_class_rejected() {
        assert!(DecisionTree::fit(&[vec![0.0f64]], &[1], &DecisionTreeParams::default()).is_err());
    }
}
