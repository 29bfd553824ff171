//! Mean normalization and three feature rankings (extremely randomized trees,
//! boosted-tree gain, correlation filter) fused into one optimized subset.

mod cfs;
mod extra_trees;
mod fuse;
mod normalize;
pub mod report;
mod sweep;

use serde::{Deserialize, Serialize};

pub use cfs::{correlation_select, pearson, CfsResult, CORRELATION_TIE};
pub use extra_trees::{extra_trees_importance, ExtraTreesParams};
pub use fuse::{fuse_selection, FusedFeature};
pub use normalize::Normalizer;
pub use sweep::{accuracy_vs_feature_count, SweepPoint};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{stratified_indices, Gbt, GbtParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub name: String,
    pub score: f64,
}

/// Names sorted by descending score; equal scores keep column order.
pub fn rank(names: &[String], scores: &[f64]) -> Vec<FeatureScore> {
    let mut idx: Vec<usize> = (0..names.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.into_iter()
        .map(|i| FeatureScore {
            name: names[i].clone(),
            score: scores[i],
        })
        .collect()
}

/// Normalized total split gain of a boosted-tree fit.
pub fn gbt_importance<T: Scalar>(m: &FeatureMatrix<T>, params: &GbtParams, seed: u64) -> Result<Vec<f64>> {
    let g = Gbt::fit(m.rows(), m.labels(), params, seed)?;
    Ok(g.importance().into_iter().map(|v| v.as_f64()).collect())
}

pub const METHOD_EXTRA_TREES: &str = "extra_trees";
pub const METHOD_GBT: &str = "gbt";
pub const METHOD_CFS: &str = "cfs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub extra_trees: ExtraTreesParams,
    pub gbt: GbtParams,
    pub redundancy_cutoff: f64,
    pub top_n: usize,
    pub fused_k: usize,
    /// Feature counts for the accuracy sweep; empty skips it.
    pub sweep_counts: Vec<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            extra_trees: ExtraTreesParams::default(),
            gbt: GbtParams::default(),
            redundancy_cutoff: 0.85,
            top_n: 10,
            fused_k: 14,
            sweep_counts: Vec::new(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        self.extra_trees.validate()?;
        self.gbt.validate()?;
        if !(0.0..=1.0).contains(&self.redundancy_cutoff) {
            return Err(Error::invalid_arg("redundancy_cutoff must be in [0, 1]"));
        }
        if self.top_n == 0 || self.fused_k == 0 {
            return Err(Error::invalid_arg("top_n and fused_k must be >= 1"));
        }
        if self.sweep_counts.contains(&0) {
            return Err(Error::invalid_arg("sweep counts must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRanking {
    pub method: String,
    /// Every feature, best first.
    pub ranked: Vec<FeatureScore>,
    pub top: Vec<FeatureScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub seed: u64,
    pub test_fraction: f64,
    pub n_train_rows: usize,
    pub normalizer: Normalizer<f64>,
    pub methods: Vec<MethodRanking>,
    /// CFS ranking after the redundancy filter.
    pub cfs_kept: Vec<FeatureScore>,
    pub fused: Vec<FusedFeature>,
    pub sweep: Vec<SweepPoint>,
}

impl SelectionReport {
    pub fn method(&self, name: &str) -> Option<&MethodRanking> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn fused_names(&self) -> Vec<String> {
        self.fused.iter().map(|f| f.name.clone()).collect()
    }
}

/// Fuses the top `window` entries of each method, widening the window past
/// `top_n` only when the union holds fewer than `k` features.
fn fuse_windowed(methods: &[MethodRanking], cfs_kept: &[FeatureScore], top_n: usize, k: usize) -> Result<Vec<FusedFeature>> {
    let longest = methods.iter().map(|m| m.ranked.len()).max().unwrap_or(0);
    let mut window = top_n;
    loop {
        let lists: Vec<Vec<FeatureScore>> = methods
            .iter()
            .map(|m| {
                let src = if m.method == METHOD_CFS { cfs_kept } else { &m.ranked };
                src.iter().take(window).cloned().collect()
            })
            .collect();
        let fused = fuse_selection(&lists, k)?;
        if fused.len() >= k || window >= longest {
            return Ok(fused);
        }
        window += 1;
    }
}

/// Runs all three selectors on the normalized training rows of the stratified
/// split given by `test_fraction` and `seed`, then fuses their top lists.
pub fn select<T: Scalar>(m: &FeatureMatrix<T>, cfg: &SelectionConfig, test_fraction: f64, seed: u64) -> Result<SelectionReport> {
    cfg.validate()?;
    let s = stratified_indices(m.labels(), test_fraction, seed)?;
    let train = m.subset_rows(&s.train);
    let norm = Normalizer::fit(&train)?;
    let train = norm.apply(&train)?;
    let names = train.names();
    let (et, (gb, cfs)) = rayon::join(
        || extra_trees_importance(&train, &cfg.extra_trees, seed),
        || {
            rayon::join(
                || gbt_importance(&train, &cfg.gbt, seed),
                || correlation_select(&train, cfg.redundancy_cutoff),
            )
        },
    );
    let (et, gb, cfs) = (et?, gb?, cfs?);
    let top = |v: &[FeatureScore]| v.iter().take(cfg.top_n).cloned().collect::<Vec<_>>();
    let cfs_kept = cfs.kept.clone();
    let methods = vec![
        {
            let ranked = rank(names, &et);
            MethodRanking {
                method: METHOD_EXTRA_TREES.into(),
                top: top(&ranked),
                ranked,
            }
        },
        {
            let ranked = rank(names, &gb);
            MethodRanking {
                method: METHOD_GBT.into(),
                top: top(&ranked),
                ranked,
            }
        },
        MethodRanking {
            method: METHOD_CFS.into(),
            top: top(&cfs.kept),
            ranked: cfs.ranked,
        },
    ];
    let fused = fuse_windowed(&methods, &cfs_kept, cfg.top_n, cfg.fused_k)?;
    let sweep = if cfg.sweep_counts.is_empty() {
        Vec::new()
    } else {
        let order: Vec<String> = methods[1].ranked.iter().map(|f| f.name.clone()).collect();
        accuracy_vs_feature_count(m, &order, &cfg.gbt, &cfg.sweep_counts, test_fraction, seed)?
    };
    let normalizer = Normalizer {
        names: norm.names.clone(),
        mean: norm.mean.iter().map(|v| v.as_f64()).collect(),
        min: norm.min.iter().map(|v| v.as_f64()).collect(),
        max: norm.max.iter().map(|v| v.as_f64()).collect(),
    };
    Ok(SelectionReport {
        seed,
        test_fraction,
        n_train_rows: s.train.len(),
        normalizer,
        methods,
        cfs_kept,
        fused,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_is_stable_on_ties() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let r = rank(&names, &[0.2, 0.5, 0.2]);
        let order: Vec<&str> = r.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(order, ["b", "a", "c"]);
    }

    #[test]
    fn report_shape() {
        let n = 120;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..20).map(|j| if j == 0 { (i % 3) as f64 } else { ((i * (j + 3) * 7) % 23) as f64 }).collect())
            .collect();
        let labels = (0..n).map(|i| (i % 3) as u32 + 1).collect();
        let m = FeatureMatrix::new((0..20).map(|j| format!("f{j}")).collect(), rows, labels).unwrap();
        let cfg = SelectionConfig {
            extra_trees: ExtraTreesParams {
                n_trees: 20,
                ..Default::default()
            },
            gbt: GbtParams {
                rounds: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let r = select(&m, &cfg, 0.2, 0).unwrap();
        assert_eq!(r.methods.len(), 3);
        for meth in &r.methods {
            assert!(meth.top.len() <= 10);
            assert_eq!(meth.ranked.len(), 20);
            assert_eq!(meth.top[0].name, "f0", "{}", meth.method);
        }
        assert_eq!(r.fused.len(), 14);
        assert_eq!(r, select(&m, &cfg, 0.2, 0).unwrap());
    }
}
