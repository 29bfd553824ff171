use serde::{Deserialize, Serialize};

use super::FeatureScore;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedFeature {
    pub name: String,
    pub votes: usize,
    /// Mean of the feature's max-normalized score over the lists that contain it.
    pub mean_score: f64,
}

/// Union of per-method top lists ordered by votes, then mean normalized score,
/// then name; truncated to `k`.
pub fn fuse_selection(lists: &[Vec<FeatureScore>], k: usize) -> Result<Vec<FusedFeature>> {
    if k < 1 {
        return Err(Error::invalid_arg("fused set size must be >= 1"));
    }
    if lists.is_empty() {
        return Err(Error::invalid_arg("fusion needs at least one ranked list"));
    }
    let mut acc: Vec<(String, usize, f64)> = Vec::new();
    for list in lists {
        let peak = list.iter().map(|f| f.score).fold(0.0f64, f64::max);
        for f in list {
            let s = if peak > 0.0 { f.score / peak } else { 0.0 };
            match acc.iter_mut().find(|(n, _, _)| *n == f.name) {
                Some(e) => {
                    e.1 += 1;
                    e.2 += s;
                }
                None => acc.push((f.name.clone(), 1, s)),
            }
        }
    }
    let mut fused: Vec<FusedFeature> = acc
        .into_iter()
        .map(|(name, votes, sum)| FusedFeature {
            name,
            votes,
            mean_score: sum / votes as f64,
        })
        .collect();
    fused.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(b.mean_score.total_cmp(&a.mean_score))
            .then(a.name.cmp(&b.name))
    });
    fused.truncate(k);
    Ok(fused)
}
