use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Label;
use crate::scalar::Scalar;

/// Sorted class labels and the mapping to dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassIndex {
    classes: Vec<Label>,
}

impl ClassIndex {
    /// Requires at least two distinct labels.
    pub fn fit(labels: &[Label]) -> Result<Self> {
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::SingleClass(classes.len()));
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn encode(&self, labels: &[Label]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| self.classes.binary_search(l).expect("label seen during fit"))
            .collect()
    }

    pub fn label(&self, idx: usize) -> Label {
        self.classes[idx]
    }
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: PartialOrd + Copy>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Gini impurity `1 - sum p_c^2` of class counts.
pub fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Majority class index; the smallest index wins ties.
pub fn majority(counts: &[usize]) -> usize {
    argmax(counts)
}

/// Row-major copy of `rows` with a finiteness check, as done before every prediction.
pub fn gather_rows<T: Scalar>(rows: &[Vec<T>], n_features: usize) -> Result<Vec<T>> {
    let mut buf = Vec::with_capacity(rows.len() * n_features);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                actual: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_data(format!("row {i} contains a non-finite value")));
        }
        buf.extend_from_slice(r);
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_index_round_trip() {
        let c = ClassIndex::fit(&[3, 1, 3, 2]).unwrap();
        assert_eq!(c.classes(), [1, 2, 3]);
        assert_eq!(c.encode(&[2, 3, 1]), vec![1, 2, 0]);
        assert!(matches!(ClassIndex::fit(&[5, 5]), Err(Error::SingleClass(1))));
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[4, 0], 4), 0.0);
        assert!((gini(&[2, 2], 4) - 0.5).abs() < 1e-15);
        assert!((gini(&[1, 1, 1], 3) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(majority(&[2, 2, 1]), 0);
    }
}
