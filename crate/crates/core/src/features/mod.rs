//! Epoch feature extraction.
//!
//! Each channel of an epoch yields the registry's features (52 by default:
//! statistical, derivative, interval, Hjorth, spectral, wavelet and AR
//! families). In aggregate mode the per-channel values are averaged across
//! channels; in per-channel mode they are concatenated channel by channel.

pub mod ar;
pub mod dwt;
pub mod extract;
pub mod matrix;
pub mod registry;
pub mod spectrum;

use rayon::prelude::*;

pub use self::dwt::{dwt, idwt, Decomposition};
pub use self::extract::{
    extract_ar, extract_derivative, extract_hjorth, extract_interval, extract_spectral, extract_statistical,
    extract_wavelet, BandEdges, ChannelExtractor, FeatureConfig,
};
pub use self::matrix::{FeatureMatrix, Label};
pub use self::registry::{Family, FeatureDescriptor, FeatureRegistry};
pub use self::spectrum::{periodogram, Periodogram, Spectrum};

use crate::error::{Error, Result};
use crate::model::{ChannelLayout, Epoch, EpochOrigin, ModelType};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMode {
    /// Mean of each feature across channels.
    #[default]
    Aggregate,
    /// Channel-major concatenation, columns named `<channel>_<feature>`.
    PerChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub values: Vec<T>,
    pub label: ModelType,
    pub origin: EpochOrigin,
}

/// Extracts feature vectors from epochs.
#[derive(Debug, Clone)]
pub struct EpochFeatures<T: Scalar> {
    channel: ChannelExtractor<T>,
    mode: ChannelMode,
}

impl<T: Scalar> EpochFeatures<T> {
    pub fn new(cfg: FeatureConfig, mode: ChannelMode) -> Result<Self> {
        Ok(Self {
            channel: ChannelExtractor::new(cfg)?,
            mode,
        })
    }

    pub fn registry(&self) -> &FeatureRegistry {
        self.channel.registry()
    }

    pub fn mode(&self) -> ChannelMode {
        self.mode
    }

    /// Column names for epochs recorded with `layout`.
    pub fn column_names(&self, layout: &ChannelLayout) -> Vec<String> {
        let base = self.registry().names();
        match self.mode {
            ChannelMode::Aggregate => base,
            ChannelMode::PerChannel => layout
                .names()
                .iter()
                .flat_map(|ch| base.iter().map(move |f| format!("{ch}_{f}")))
                .collect(),
        }
    }

    pub fn extract_all(&self, epoch: &Epoch<T>) -> Result<FeatureVector<T>> {
        if epoch.n_channels() == 0 {
            return Err(Error::invalid_data("epoch has no channels"));
        }
        let per_channel: Vec<Vec<T>> = epoch
            .channels
            .iter()
            .map(|x| self.channel.extract(x))
            .collect::<Result<_>>()?;
        let values = match self.mode {
            ChannelMode::Aggregate => {
                let n = T::from_count(per_channel.len());
                (0..self.registry().len())
                    .map(|j| per_channel.iter().map(|v| v[j]).sum::<T>() / n)
                    .collect()
            }
            ChannelMode::PerChannel => per_channel.into_iter().flatten().collect(),
        };
        Ok(FeatureVector {
            values,
            label: epoch.label,
            origin: epoch.origin.clone(),
        })
    }

    /// Extracts every epoch in parallel; row order follows the input.
    pub fn extract_matrix(&self, epochs: &[Epoch<T>], layout: &ChannelLayout) -> Result<FeatureMatrix<T>> {
        let vectors: Vec<FeatureVector<T>> = epochs.par_iter().map(|e| self.extract_all(e)).collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(vectors.len());
        let mut labels = Vec::with_capacity(vectors.len());
        let mut origins = Vec::with_capacity(vectors.len());
        for v in vectors {
            rows.push(v.values);
            labels.push(Label::from(v.label.get()));
            origins.push(v.origin);
        }
        FeatureMatrix::new(self.column_names(layout), rows, labels)?.with_origins(origins)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn epoch(channels: Vec<Vec<f64>>) -> Epoch<f64> {
        Epoch {
            channels,
            label: ModelType::new(2).unwrap(),
            origin: EpochOrigin {
                subject_id: "s".into(),
                trial_index: 0,
                epoch_index: 3,
            },
        }
    }

    fn signal(seed: f64) -> Vec<f64> {
        (0..128)
            .map(|n| 10.0 * (n as f64 * 0.3 + seed).sin() + 4.0 * (n as f64 * 1.7 * seed).cos())
            .collect()
    }

    #[test]
    fn identical_channels_aggregate_to_single_channel_vector() {
        let x = signal(1.0);
        let fx = EpochFeatures::new(FeatureConfig::default(), ChannelMode::Aggregate).unwrap();
        let single = fx.extract_all(&epoch(vec![x.clone()])).unwrap();
        let many = fx.extract_all(&epoch(vec![x; 14])).unwrap();
        assert_eq!(single.values.len(), 52);
        for (a, b) in single.values.iter().zip(&many.values) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        assert_eq!(many.origin.epoch_index, 3);
    }

    #[test]
    fn per_channel_mode_concatenates() {
        let fx = EpochFeatures::new(FeatureConfig::default(), ChannelMode::PerChannel).unwrap();
        let chans: Vec<Vec<f64>> = (0..14).map(|c| signal(c as f64 + 0.5)).collect();
        let v = fx.extract_all(&epoch(chans.clone())).unwrap();
        assert_eq!(v.values.len(), 728);
        let names = fx.column_names(&ChannelLayout::epoc());
        assert_eq!(names.len(), 728);
        assert_eq!(names[52], "F7_mean");
        let one = fx.extract_all(&epoch(vec![chans[1].clone()])).unwrap();
        assert_eq!(&v.values[52..104], &one.values[..]);
    }
}
