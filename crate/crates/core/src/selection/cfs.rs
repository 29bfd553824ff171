use serde::{Deserialize, Serialize};

use super::FeatureScore;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::scalar::Scalar;

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Correlations closer than this are treated as equal, so exactly collinear
/// columns (for example a sum and the matching mean) rank by column order
/// instead of by rounding noise.
pub const CORRELATION_TIE: f64 = 1e-10;

/// Descending by score; runs of scores each within `tol` of the previous one
/// form a tie group ordered by column index.
fn rank_with_ties(names: &[String], scores: &[f64], tol: f64) -> Vec<FeatureScore> {
    let mut idx: Vec<usize> = (0..names.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end - 1]] - scores[idx[end]] <= tol {
            end += 1;
        }
        let group = &mut idx[start..end];
        group.sort_unstable();
        out.extend(group.iter().map(|&i| FeatureScore {
            name: names[i].clone(),
            score: scores[i],
        }));
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfsResult {
    /// Every feature by `|corr(feature, label)|`, descending.
    pub ranked: Vec<FeatureScore>,
    /// `ranked` after dropping features too correlated with an earlier kept one.
    pub kept: Vec<FeatureScore>,
}

/// Relevance ranking by absolute correlation with the numeric label, followed by
/// a greedy redundancy filter at `redundancy_cutoff`.
pub fn correlation_select<T: Scalar>(m: &FeatureMatrix<T>, redundancy_cutoff: f64) -> Result<CfsResult> {
    if m.n_rows() < 2 {
        return Err(Error::invalid_data("correlation selection needs at least 2 rows"));
    }
    if !(0.0..=1.0).contains(&redundancy_cutoff) {
        return Err(Error::invalid_arg("redundancy cutoff must be in [0, 1]"));
    }
    let y: Vec<f64> = m.labels().iter().map(|&l| l as f64).collect();
    let cols: Vec<Vec<f64>> = (0..m.n_features())
        .map(|j| m.column(j).into_iter().map(|v| v.as_f64()).collect())
        .collect();
    let scores: Vec<f64> = cols.iter().map(|c| pearson(c, &y).abs()).collect();
    let ranked = rank_with_ties(m.names(), &scores, CORRELATION_TIE);
    let mut kept: Vec<FeatureScore> = Vec::new();
    let mut kept_idx: Vec<usize> = Vec::new();
    for fs in &ranked {
        let j = m.column_index(&fs.name).expect("ranked from names");
        if kept_idx.iter().all(|&k| pearson(&cols[j], &cols[k]).abs() <= redundancy_cutoff) {
            kept_idx.push(j);
            kept.push(fs.clone());
        }
    }
    Ok(CfsResult { ranked, kept })
}
