use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{BandEdges, ChannelMode, FeatureConfig};
use crate::io::{read_json, write_json};
use crate::learners::{ClassifierParams, ClassifierSpec, Table4Options};
use crate::preprocess::ArtifactOptions;
use crate::selection::SelectionConfig;

/// Every tunable of a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bands: BandEdges,
    /// Bandpass edges in Hz applied before artifact suppression.
    pub bandpass: [f64; 2],
    pub artifacts: ArtifactOptions,
    pub wavelet_levels: usize,
    pub ar_order: usize,
    pub epoch_s: f64,
    pub split_fraction: f64,
    pub seed: u64,
    pub per_channel_mode: bool,
    pub selection: SelectionConfig,
    /// Classifier families and hyperparameters; each is seeded with `seed`.
    pub learners: Vec<ClassifierParams>,
    /// Prediction passes per model; the fastest is reported.
    pub timing_repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            bands: BandEdges::default(),
            bandpass: [0.5, 45.0],
            artifacts: ArtifactOptions::default(),
            wavelet_levels: 4,
            ar_order: 6,
            epoch_s: 1.0,
            split_fraction: 0.2,
            seed: 0,
            per_channel_mode: false,
            selection: SelectionConfig::default(),
            learners: ClassifierSpec::defaults(0).into_iter().map(|s| s.params).collect(),
            timing_repeats: 5,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.bands.validate()?;
        let [lo, hi] = self.bandpass;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(Error::invalid_arg(format!("bandpass edges must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::invalid_arg(format!("split_fraction must be in (0, 1), got {}", self.split_fraction)));
        }
        if !(self.epoch_s.is_finite() && self.epoch_s > 0.0) {
            return Err(Error::invalid_arg("epoch_s must be positive"));
        }
        if self.timing_repeats == 0 {
            return Err(Error::invalid_arg("timing_repeats must be >= 1"));
        }
        if self.learners.is_empty() {
            return Err(Error::invalid_arg("at least one learner is required"));
        }
        self.selection.validate()?;
        for l in &self.learners {
            l.validate()?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    /// SHA-256 of the compact JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn channel_mode(&self) -> ChannelMode {
        if self.per_channel_mode {
            ChannelMode::PerChannel
        } else {
            ChannelMode::Aggregate
        }
    }

    pub fn feature_config(&self, fs: u32) -> FeatureConfig {
        FeatureConfig {
            fs,
            epoch_len: (self.epoch_s * fs as f64).round() as usize,
            bands: self.bands,
            wavelet_levels: self.wavelet_levels,
            ar_order: self.ar_order,
        }
    }

    pub fn classifier_specs(&self) -> Vec<ClassifierSpec> {
        self.learners.iter().map(|p| ClassifierSpec::new(p.clone(), self.seed)).collect()
    }

    pub fn table4_options(&self) -> Table4Options {
        Table4Options {
            test_fraction: self.split_fraction,
            seed: self.seed,
            timing_repeats: self.timing_repeats,
            normalize: true,
        }
    }
}
