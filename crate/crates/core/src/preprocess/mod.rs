//! Bandpass, artifact suppression and epoching, applied in that order.

pub mod artifacts;
pub mod filter;
pub mod segment;

pub use artifacts::{suppress_artifacts, wavelet_denoise, ArtifactOptions, CleanRecording, CleaningAction, CleaningEntry};
pub use filter::{bandpass, Bandpass, Biquad};
pub use segment::{segment, segment_recording, EpochIndexEntry, EpochSet};

use crate::error::Result;
use crate::model::Recording;
use crate::scalar::Scalar;

/// Filter and clean one trial, then cut it into epochs.
pub fn preprocess_trial<T: Scalar>(
    r: &Recording<T>,
    band: (f64, f64),
    artifacts: &ArtifactOptions,
    epoch_s: f64,
) -> Result<(EpochSet<T>, Vec<CleaningEntry>)> {
    let filtered = bandpass(r, band.0, band.1)?;
    let clean = suppress_artifacts(&filtered, artifacts)?;
    let epochs = segment(&clean, epoch_s)?;
    Ok((epochs, clean.log))
}
