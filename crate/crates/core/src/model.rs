//! Recordings, trial metadata and epochs.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sampling rate of the Emotiv EPOC+ headset.
pub const DEFAULT_FS: u32 = 128;

/// The 14 signal electrodes of the EPOC+ in device order (10-20 names).
pub const EPOC_CHANNELS: [&str; 14] = [
    "AF3", "F7", "F3", "FC5", "T7", "P7", "O1", "O2", "P8", "T8", "FC6", "F4", "F8", "AF4",
];

/// Ordered, unique channel labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ChannelLayout {
    names: Vec<String>,
}

impl ChannelLayout {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::invalid_data("channel layout is empty"));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.trim().is_empty() {
                return Err(Error::invalid_data("empty channel name"));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::invalid_data(format!("duplicate channel name {n:?}")));
            }
        }
        Ok(Self { names })
    }

    /// The 14-channel EPOC+ layout.
    pub fn epoc() -> Self {
        Self {
            names: EPOC_CHANNELS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl Default for ChannelLayout {
    fn default() -> Self {
        Self::epoc()
    }
}

impl TryFrom<Vec<String>> for ChannelLayout {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ChannelLayout> for Vec<String> {
    fn from(l: ChannelLayout) -> Self {
        l.names
    }
}

/// Workload class of a trial: the complexity level of the modelling task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ModelType(u8);

impl ModelType {
    pub const ALL: [ModelType; 3] = [ModelType(1), ModelType(2), ModelType(3)];

    pub fn new(v: u8) -> Result<Self> {
        if (1..=3).contains(&v) {
            Ok(Self(v))
        } else {
            Err(Error::invalid_data(format!("model type must be 1, 2 or 3, got {v}")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Default (idle head, task, idle tail) durations in seconds.
    pub fn default_durations(self) -> (f64, f64, f64) {
        match self.0 {
            1 => (5.0, 40.0, 5.0),
            2 => (5.0, 100.0, 5.0),
            _ => (5.0, 160.0, 5.0),
        }
    }
}

impl TryFrom<u8> for ModelType {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ModelType> for u8 {
    fn from(m: ModelType) -> u8 {
        m.0
    }
}

impl fmt::Display for ModelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMeta {
    pub subject_id: String,
    pub trial_index: u32,
    pub model_type: ModelType,
    pub idle_head_s: f64,
    pub task_s: f64,
    pub idle_tail_s: f64,
}

impl TrialMeta {
    /// Metadata with the standard durations for `model_type`.
    pub fn standard(subject_id: impl Into<String>, trial_index: u32, model_type: ModelType) -> Self {
        let (idle_head_s, task_s, idle_tail_s) = model_type.default_durations();
        Self {
            subject_id: subject_id.into(),
            trial_index,
            model_type,
            idle_head_s,
            task_s,
            idle_tail_s,
        }
    }

    pub fn total_s(&self) -> f64 {
        self.idle_head_s + self.task_s + self.idle_tail_s
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("idle_head_s", self.idle_head_s),
            ("task_s", self.task_s),
            ("idle_tail_s", self.idle_tail_s),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid_data(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Continuous multi-channel recording in microvolts.
///
/// Samples are stored channel-major; `sample(t, c)` addresses the logical
/// `[n_samples x n_channels]` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording<T> {
    layout: ChannelLayout,
    fs: u32,
    channels: Vec<Vec<T>>,
    meta: TrialMeta,
}

impl<T: Scalar> Recording<T> {
    /// Builds a recording from channel-major data.
    pub fn from_channels(
        layout: ChannelLayout,
        fs: u32,
        channels: Vec<Vec<T>>,
        meta: TrialMeta,
    ) -> Result<Self> {
        if fs == 0 {
            return Err(Error::invalid_data("sampling rate must be positive"));
        }
        if channels.len() != layout.len() {
            return Err(Error::invalid_data(format!(
                "layout has {} channels but {} data columns were given",
                layout.len(),
                channels.len()
            )));
        }
        let n = channels[0].len();
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != n {
                return Err(Error::invalid_data(format!(
                    "channel {} has {} samples, expected {n}",
                    layout.names()[c],
                    ch.len()
                )));
            }
            if let Some(t) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid_data(format!(
                    "non-finite sample in channel {} at index {t}",
                    layout.names()[c]
                )));
            }
        }
        meta.validate()?;
        Ok(Self {
            layout,
            fs,
            channels,
            meta,
        })
    }

    /// Builds a recording from sample-major rows.
    pub fn from_rows(layout: ChannelLayout, fs: u32, rows: &[Vec<T>], meta: TrialMeta) -> Result<Self> {
        let nc = layout.len();
        let mut channels = vec![Vec::with_capacity(rows.len()); nc];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return Err(Error::invalid_data(format!(
                    "row {t} has {} values, expected {nc}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                channels[c].push(v);
            }
        }
        Self::from_channels(layout, fs, channels, meta)
    }

    pub fn layout(&self) -> &ChannelLayout {
        &self.layout
    }

    pub fn fs(&self) -> u32 {
        self.fs
    }

    pub fn meta(&self) -> &TrialMeta {
        &self.meta
    }

    pub fn n_samples(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / f64::from(self.fs)
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<T>] {
        &self.channels
    }

    pub fn sample(&self, t: usize, c: usize) -> T {
        self.channels[c][t]
    }

    pub fn row(&self, t: usize) -> Vec<T> {
        self.channels.iter().map(|ch| ch[t]).collect()
    }

    /// Same layout and metadata, new channel data of identical shape.
    pub(crate) fn with_channels(&self, channels: Vec<Vec<T>>) -> Self {
        debug_assert_eq!(channels.len(), self.channels.len());
        Self {
            layout: self.layout.clone(),
            fs: self.fs,
            channels,
            meta: self.meta.clone(),
        }
    }

    pub fn into_channels(self) -> Vec<Vec<T>> {
        self.channels
    }
}

/// Amplitude above which a sample is reported as implausible EEG.
pub const AMPLITUDE_WARN_UV: f64 = 500.0;

/// Non-fatal quality checks: short duration, flat channels, implausible amplitudes.
pub fn validate_recording<T: Scalar>(r: &Recording<T>) -> Vec<String> {
    let mut warnings = Vec::new();
    let expected = r.meta().total_s() * f64::from(r.fs());
    if (r.n_samples() as f64) + 0.5 < expected {
        warnings.push(format!(
            "duration {:.3} s shorter than the {:.3} s implied by trial metadata",
            r.duration_s(),
            r.meta().total_s()
        ));
    }
    let limit = T::lit(AMPLITUDE_WARN_UV);
    for (c, name) in r.layout().names().iter().enumerate() {
        let ch = r.channel(c);
        if ch.iter().all(|&v| v == ch[0]) {
            warnings.push(format!("flat channel: {name}"));
        }
        if let Some(t) = ch.iter().position(|v| v.abs() > limit) {
            warnings.push(format!(
                "amplitude above {AMPLITUDE_WARN_UV} uV on channel {name} at sample {t} ({:.3} s)",
                t as f64 / f64::from(r.fs())
            ));
        }
    }
    warnings
}

/// Position of an epoch within the dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpochOrigin {
    pub subject_id: String,
    pub trial_index: u32,
    pub epoch_index: u32,
}

/// Fixed-length labelled window, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch<T> {
    pub channels: Vec<Vec<T>>,
    pub label: ModelType,
    pub origin: EpochOrigin,
}

impl<T> Epoch<T> {
    pub fn n_samples(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }
}
