//! Synthetic multi-channel trials with class-dependent band power.
//!
//! Each channel is a sum of one sinusoid per band (frequency drawn inside the
//! band, random phase) plus pink noise. By default theta amplitude rises and
//! alpha amplitude falls with the model type.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::BandEdges;
use crate::io::{write_json, write_recording};
use crate::model::{ChannelLayout, ModelType, Recording, TrialMeta, DEFAULT_FS};
use crate::scalar::Scalar;

/// Sinusoid amplitudes in microvolts for one model type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassAmplitudes {
    pub model_type: u8,
    pub delta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ClassAmplitudes {
    fn as_array(&self) -> [f64; 4] {
        [self.delta, self.theta, self.alpha, self.beta]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub n_subjects: usize,
    pub trials_per_type: usize,
    /// Workload types to generate trials for.
    pub model_types: Vec<u8>,
    pub fs: u32,
    pub channels: Vec<String>,
    pub class_amplitudes: Vec<ClassAmplitudes>,
    pub bands: BandEdges,
    /// RMS of the pink noise per channel.
    pub noise_uv: f64,
    /// Per-subject, per-channel amplitude scale is drawn from `1 +- subject_jitter`.
    pub subject_jitter: f64,
    /// Expected artifacts per minute; 0 disables injection.
    pub artifact_rate_per_min: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        let class = |model_type, theta, alpha| ClassAmplitudes {
            model_type,
            delta: 10.0,
            theta,
            alpha,
            beta: 4.0,
        };
        Self {
            n_subjects: 8,
            trials_per_type: 1,
            model_types: vec![1, 2, 3],
            fs: DEFAULT_FS,
            channels: ChannelLayout::epoc().names().to_vec(),
            class_amplitudes: vec![class(1, 6.0, 12.0), class(2, 9.0, 9.0), class(3, 12.0, 6.0)],
            bands: BandEdges::default(),
            noise_uv: 4.0,
            subject_jitter: 0.15,
            artifact_rate_per_min: 1.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects == 0 || self.trials_per_type == 0 {
            return Err(Error::invalid_arg("n_subjects and trials_per_type must be >= 1"));
        }
        if self.fs == 0 {
            return Err(Error::invalid_arg("fs must be positive"));
        }
        if self.model_types.is_empty() {
            return Err(Error::invalid_arg("model_types must not be empty"));
        }
        for (i, &t) in self.model_types.iter().enumerate() {
            ModelType::new(t)?;
            if self.model_types[..i].contains(&t) {
                return Err(Error::invalid_arg(format!("model type {t} listed twice")));
            }
        }
        ChannelLayout::new(self.channels.iter().cloned())?;
        self.bands.validate()?;
        if self.bands.as_array().iter().any(|b| b[1] >= self.fs as f64 / 2.0) {
            return Err(Error::invalid_arg("band edges must lie below the Nyquist frequency"));
        }
        for t in ModelType::ALL {
            let n = self.class_amplitudes.iter().filter(|c| c.model_type == t.get()).count();
            if n != 1 {
                return Err(Error::invalid_arg(format!("class_amplitudes must specify model type {t} exactly once")));
            }
        }
        for c in &self.class_amplitudes {
            ModelType::new(c.model_type)?;
            if c.as_array().iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                return Err(Error::invalid_arg(format!("amplitudes for model type {} must be >= 0", c.model_type)));
            }
        }
        for (name, v) in [
            ("noise_uv", self.noise_uv),
            ("subject_jitter", self.subject_jitter),
            ("artifact_rate_per_min", self.artifact_rate_per_min),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid_arg(format!("{name} must be finite and >= 0")));
            }
        }
        if self.subject_jitter >= 1.0 {
            return Err(Error::invalid_arg("subject_jitter must be < 1"));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let spec: Self = crate::io::read_json(path)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn layout(&self) -> Result<ChannelLayout> {
        ChannelLayout::new(self.channels.iter().cloned())
    }

    fn amplitudes(&self, t: ModelType) -> [f64; 4] {
        self.class_amplitudes
            .iter()
            .find(|c| c.model_type == t.get())
            .map(ClassAmplitudes::as_array)
            .expect("validated")
    }

    /// Number of trial files `write_dataset` produces.
    pub fn n_trials(&self) -> usize {
        self.n_subjects * self.model_types.len() * self.trials_per_type
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const SUBJECT_STREAM: u64 = 1 << 62;
const ARTIFACT_STREAM: u64 = 1 << 61;

fn trial_stream(subject: usize, t: ModelType, trial: u32) -> u64 {
    ((subject as u64) << 24) | (u64::from(t.get()) << 16) | u64::from(trial)
}

/// Gaussian noise with a 1/f power spectrum, scaled to the given RMS.
pub fn pink_noise(n: usize, rms: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if n == 0 || rms == 0.0 {
        return vec![0.0; n];
    }
    let mut spec: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let f = k.min(n - k);
            if f == 0 {
                return Complex::new(0.0, 0.0);
            }
            let s = 1.0 / (f as f64).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(re * s, im * s)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    let x: Vec<f64> = spec.iter().map(|c| c.re).collect();
    let cur = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if cur == 0.0 {
        return x;
    }
    x.into_iter().map(|v| v * rms / cur).collect()
}

/// One trial of `model_type` for `subject` with standard durations and no artifacts.
pub fn generate_trial<T: Scalar>(spec: &SynthSpec, subject: usize, model_type: ModelType, trial_index: u32) -> Result<Recording<T>> {
    spec.validate()?;
    let layout = spec.layout()?;
    let meta = TrialMeta::standard(format!("S{:02}", subject + 1), trial_index, model_type);
    let fs = spec.fs as f64;
    let n = (meta.total_s() * fs).round() as usize;
    let mut subj_rng = rng_for(spec.seed, SUBJECT_STREAM | subject as u64);
    let gains: Vec<f64> = (0..layout.len())
        .map(|_| 1.0 + spec.subject_jitter * (2.0 * subj_rng.random::<f64>() - 1.0))
        .collect();
    let mut rng = rng_for(spec.seed, trial_stream(subject, model_type, trial_index));
    let amps = spec.amplitudes(model_type);
    let bands = spec.bands.as_array();
    let channels = gains
        .iter()
        .map(|&gain| {
            let comps: Vec<(f64, f64, f64)> = bands
                .iter()
                .zip(&amps)
                .map(|(b, &a)| {
                    let f = rng.random_range(b[0]..b[1]);
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    (a * gain, f, phase)
                })
                .collect();
            let noise = pink_noise(n, spec.noise_uv, &mut rng);
            (0..n)
                .map(|i| {
                    let t = i as f64 / fs;
                    let s: f64 = comps
                        .iter()
                        .map(|&(a, f, ph)| a * (std::f64::consts::TAU * f * t + ph).sin())
                        .sum();
                    T::lit(s + noise[i])
                })
                .collect()
        })
        .collect();
    Recording::from_channels(layout, spec.fs, channels, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Blink,
    MuscleBurst,
}

/// Ground truth for one injected artifact; `end` is exclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedArtifact {
    pub kind: ArtifactKind,
    pub channel: String,
    pub start: usize,
    pub end: usize,
}

fn channels_matching(layout: &ChannelLayout, pred: impl Fn(&str) -> bool) -> Vec<usize> {
    let hit: Vec<usize> = (0..layout.len()).filter(|&c| pred(&layout.names()[c])).collect();
    if hit.is_empty() {
        (0..layout.len()).collect()
    } else {
        hit
    }
}

fn hann(i: usize, len: usize) -> f64 {
    if len <= 1 {
        return 1.0;
    }
    0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (len - 1) as f64).cos()
}

/// Adds blinks (300 ms bumps of 300 to 500 uV on frontal channels) and muscle
/// bursts (20 to 60 Hz on temporal channels) at Poisson-distributed times.
/// At least one blink is added whenever `rate_per_min > 0`.
pub fn inject_artifacts<T: Scalar>(r: &Recording<T>, rate_per_min: f64, seed: u64) -> Result<(Recording<T>, Vec<InjectedArtifact>)> {
    if !(rate_per_min.is_finite() && rate_per_min >= 0.0) {
        return Err(Error::invalid_arg("artifact rate must be finite and >= 0"));
    }
    if rate_per_min == 0.0 || r.n_samples() == 0 {
        return Ok((r.clone(), Vec::new()));
    }
    let layout = r.layout();
    let fs = r.fs() as f64;
    let n = r.n_samples();
    let mut rng = rng_for(seed, ARTIFACT_STREAM);
    let expected = rate_per_min * r.duration_s() / 60.0;
    let count = (Poisson::new(expected).map(|p| p.sample(&mut rng)).unwrap_or(1.0) as usize).max(1);
    let frontal = channels_matching(layout, |c| c.starts_with("AF") || (c.starts_with('F') && !c.starts_with("FC")));
    let temporal = channels_matching(layout, |c| c.starts_with('T'));
    let mut channels: Vec<Vec<f64>> = r.channels().iter().map(|c| c.iter().map(|v| v.as_f64()).collect()).collect();
    let mut index = Vec::new();
    for k in 0..count {
        let blink = k == 0 || rng.random_bool(0.5);
        if blink {
            let len = ((0.3 * fs).round() as usize).clamp(1, n);
            let start = rng.random_range(0..=n - len);
            let amp = rng.random_range(300.0..=500.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            for &c in &frontal {
                for i in 0..len {
                    channels[c][start + i] += amp * hann(i, len);
                }
                index.push(InjectedArtifact {
                    kind: ArtifactKind::Blink,
                    channel: layout.names()[c].clone(),
                    start,
                    end: start + len,
                });
            }
        } else {
            let len = ((rng.random_range(0.2..0.5) * fs).round() as usize).clamp(1, n);
            let start = rng.random_range(0..=n - len);
            let nyq = fs / 2.0;
            let comps: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| {
                    let f = rng.random_range(20.0..60.0f64).min(nyq * 0.95);
                    (rng.random_range(30.0..60.0), f, rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            for &c in &temporal {
                for i in 0..len {
                    let t = i as f64 / fs;
                    let s: f64 = comps
                        .iter()
                        .map(|&(a, f, ph)| a * (std::f64::consts::TAU * f * t + ph).sin())
                        .sum();
                    channels[c][start + i] += s * hann(i, len);
                }
                index.push(InjectedArtifact {
                    kind: ArtifactKind::MuscleBurst,
                    channel: layout.names()[c].clone(),
                    start,
                    end: start + len,
                });
            }
        }
    }
    let out = channels.into_iter().map(|c| c.into_iter().map(T::lit).collect()).collect();
    Ok((r.with_channels(out), index))
}

/// Every trial of the spec with artifacts injected, ordered by subject, type, trial.
pub fn generate_dataset<T: Scalar>(spec: &SynthSpec) -> Result<Vec<(Recording<T>, Vec<InjectedArtifact>)>> {
    spec.validate()?;
    let types: Vec<ModelType> = spec.model_types.iter().map(|&t| ModelType::new(t)).collect::<Result<_>>()?;
    let mut jobs: Vec<(usize, ModelType, u32)> = Vec::with_capacity(spec.n_trials());
    for s in 0..spec.n_subjects {
        for &t in &types {
            jobs.extend((0..spec.trials_per_type as u32).map(|k| (s, t, k)));
        }
    }
    jobs.par_iter()
        .map(|&(s, t, k)| {
            let clean = generate_trial(spec, s, t, k)?;
            inject_artifacts(&clean, spec.artifact_rate_per_min, spec.seed ^ trial_stream(s, t, k))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthArtifactLog {
    pub trial: String,
    pub artifacts: Vec<InjectedArtifact>,
}

/// Writes every trial as CSV + manifest, plus `artifacts.json` with the injected
/// ground truth. Returns the written trial CSV paths.
pub fn write_dataset(spec: &SynthSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let trials = generate_dataset::<f64>(spec)?;
    let written: Vec<(PathBuf, SynthArtifactLog)> = trials
        .par_iter()
        .map(|(r, arts)| {
            let m = r.meta();
            let stem = format!("{}_type{}_trial{}", m.subject_id, m.model_type, m.trial_index);
            let (csv, _) = write_recording(r, dir, &stem)?;
            Ok((
                csv,
                SynthArtifactLog {
                    trial: stem,
                    artifacts: arts.clone(),
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (paths, logs): (Vec<PathBuf>, Vec<SynthArtifactLog>) = written.into_iter().unzip();
    write_json(&dir.join("artifacts.json"), &logs)?;
    Ok(paths)
}
