use serde::{Deserialize, Serialize};

use super::artifacts::CleanRecording;
use crate::error::{Error, Result};
use crate::model::{ChannelLayout, Epoch, EpochOrigin, Recording};
use crate::scalar::Scalar;

/// Labelled epochs of equal shape plus the segmentation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSet<T> {
    pub epochs: Vec<Epoch<T>>,
    pub layout: ChannelLayout,
    pub fs: u32,
    pub epoch_len: usize,
    pub epoch_s: f64,
}

impl<T: Scalar> EpochSet<T> {
    pub fn empty(layout: ChannelLayout, fs: u32, epoch_s: f64) -> Self {
        Self {
            epochs: Vec::new(),
            layout,
            fs,
            epoch_len: epoch_samples(fs, epoch_s),
            epoch_s,
        }
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    /// Appends another set with the same geometry.
    pub fn extend(&mut self, other: EpochSet<T>) -> Result<()> {
        if other.layout != self.layout || other.fs != self.fs || other.epoch_len != self.epoch_len {
            return Err(Error::invalid_data(
                "cannot merge epochs with different channel layout, rate or length",
            ));
        }
        self.epochs.extend(other.epochs);
        Ok(())
    }

    pub fn index(&self) -> Vec<EpochIndexEntry> {
        self.epochs
            .iter()
            .map(|e| EpochIndexEntry {
                origin: e.origin.clone(),
                label: e.label.get(),
            })
            .collect()
    }
}

/// Serializable epoch listing (no sample data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochIndexEntry {
    #[serde(flatten)]
    pub origin: EpochOrigin,
    pub label: u8,
}

fn epoch_samples(fs: u32, epoch_s: f64) -> usize {
    (epoch_s * f64::from(fs)).round() as usize
}

/// Cuts the task region of a trial into consecutive, non-overlapping epochs.
///
/// Idle head and tail are excluded and a partial trailing window is dropped.
pub fn segment<T: Scalar>(clean: &CleanRecording<T>, epoch_s: f64) -> Result<EpochSet<T>> {
    segment_recording(&clean.recording, epoch_s)
}

pub fn segment_recording<T: Scalar>(r: &Recording<T>, epoch_s: f64) -> Result<EpochSet<T>> {
    if !(epoch_s.is_finite() && epoch_s > 0.0) {
        return Err(Error::invalid_arg("epoch length must be positive"));
    }
    let fs = f64::from(r.fs());
    let len = epoch_samples(r.fs(), epoch_s);
    if len == 0 {
        return Err(Error::invalid_arg("epoch shorter than one sample"));
    }
    let meta = r.meta();
    let start = (meta.idle_head_s * fs).round() as usize;
    let task = (meta.task_s * fs).round() as usize;
    let available = task.min(r.n_samples().saturating_sub(start));
    let count = available / len;
    if count == 0 {
        return Err(Error::invalid_data(format!(
            "trial {}/{}: task region of {available} samples is shorter than one {len}-sample epoch",
            meta.subject_id, meta.trial_index
        )));
    }
    let epochs = (0..count)
        .map(|k| {
            let a = start + k * len;
            Epoch {
                channels: r.channels().iter().map(|ch| ch[a..a + len].to_vec()).collect(),
                label: meta.model_type,
                origin: EpochOrigin {
                    subject_id: meta.subject_id.clone(),
                    trial_index: meta.trial_index,
                    epoch_index: k as u32,
                },
            }
        })
        .collect();
    Ok(EpochSet {
        epochs,
        layout: r.layout().clone(),
        fs: r.fs(),
        epoch_len: len,
        epoch_s,
    })
}
