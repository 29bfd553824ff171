//! Artifact suppression: amplitude clipping plus optional wavelet
//! soft-thresholding, with an audit log of every change.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::dwt::{dwt, idwt};
use crate::model::Recording;
use crate::scalar::Scalar;

/// Median absolute deviation to Gaussian sigma.
const MAD_TO_SIGMA: f64 = 0.6745;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CleaningAction {
    /// Samples beyond the amplitude limit were clipped to it.
    Clip { limit_uv: f64 },
    /// Detail coefficients were soft-thresholded.
    WaveletThreshold { threshold: f64, coefficients_shrunk: usize },
    /// Reconstruction overshoot clamped back to the channel's input peak.
    Clamp { limit_uv: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningEntry {
    pub channel: String,
    /// Half-open sample range `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub action: CleaningAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanRecording<T> {
    pub recording: Recording<T>,
    pub log: Vec<CleaningEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArtifactOptions {
    pub amp_limit_uv: f64,
    pub wavelet_threshold: bool,
    pub wavelet_levels: usize,
}

impl Default for ArtifactOptions {
    fn default() -> Self {
        Self {
            amp_limit_uv: 100.0,
            wavelet_threshold: true,
            wavelet_levels: 4,
        }
    }
}

fn clip_runs<T: Scalar>(x: &mut [T], limit: T) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, v) in x.iter_mut().enumerate() {
        if v.abs() > limit {
            *v = v.signum() * limit;
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            runs.push((s, i));
        }
    }
    if let Some(s) = start {
        runs.push((s, x.len()));
    }
    runs
}

fn median_abs<T: Scalar>(x: &[T]) -> T {
    let mut a: Vec<T> = x.iter().map(|v| v.abs()).collect();
    if a.is_empty() {
        return T::zero();
    }
    a.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    let n = a.len();
    if n % 2 == 1 {
        a[n / 2]
    } else {
        (a[n / 2 - 1] + a[n / 2]) / T::lit(2.0)
    }
}

fn soft<T: Scalar>(c: T, thr: T) -> T {
    let mag = c.abs() - thr;
    if mag > T::zero() {
        c.signum() * mag
    } else {
        T::zero()
    }
}

/// Universal-threshold wavelet shrinkage of one channel.
/// Returns the denoised signal, the threshold and the number of shrunk coefficients.
pub fn wavelet_denoise<T: Scalar>(x: &[T], levels: usize) -> Result<(Vec<T>, T, usize)> {
    let mut dec = dwt(x, levels)?;
    let sigma = median_abs(&dec.details[0]) / T::lit(MAD_TO_SIGMA);
    let thr = sigma * (T::lit(2.0) * T::from_count(x.len()).ln()).sqrt();
    if thr <= T::zero() {
        return Ok((x.to_vec(), T::zero(), 0));
    }
    let mut shrunk = 0;
    for d in dec.details.iter_mut() {
        for c in d.iter_mut() {
            let s = soft(*c, thr);
            if s != *c {
                shrunk += 1;
            }
            *c = s;
        }
    }
    Ok((idwt(&dec), thr, shrunk))
}

/// Clips samples beyond `±amp_limit_uv`, then optionally soft-thresholds
/// wavelet details. Never increases any channel's peak magnitude.
pub fn suppress_artifacts<T: Scalar>(r: &Recording<T>, opts: &ArtifactOptions) -> Result<CleanRecording<T>> {
    if !(opts.amp_limit_uv.is_finite() && opts.amp_limit_uv > 0.0) {
        return Err(Error::invalid_arg("amplitude limit must be positive"));
    }
    let limit = T::lit(opts.amp_limit_uv);
    let names = r.layout().names();
    let results: Vec<(Vec<T>, Vec<CleaningEntry>)> = r
        .channels()
        .par_iter()
        .enumerate()
        .map(|(c, ch)| -> Result<_> {
            let mut x = ch.clone();
            let mut log: Vec<CleaningEntry> = clip_runs(&mut x, limit)
                .into_iter()
                .map(|(start, end)| CleaningEntry {
                    channel: names[c].clone(),
                    start,
                    end,
                    action: CleaningAction::Clip {
                        limit_uv: opts.amp_limit_uv,
                    },
                })
                .collect();
            if opts.wavelet_threshold && x.len() >= crate::features::dwt::DB4_LEN {
                let peak = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                let (den, thr, shrunk) = wavelet_denoise(&x, opts.wavelet_levels)?;
                if shrunk > 0 {
                    log.push(CleaningEntry {
                        channel: names[c].clone(),
                        start: 0,
                        end: x.len(),
                        action: CleaningAction::WaveletThreshold {
                            threshold: thr.as_f64(),
                            coefficients_shrunk: shrunk,
                        },
                    });
                    x = den;
                    for (start, end) in clip_runs(&mut x, peak) {
                        log.push(CleaningEntry {
                            channel: names[c].clone(),
                            start,
                            end,
                            action: CleaningAction::Clamp { limit_uv: peak.as_f64() },
                        });
                    }
                }
            }
            Ok((x, log))
        })
        .collect::<Result<_>>()?;
    let mut channels = Vec::with_capacity(results.len());
    let mut log = Vec::new();
    for (x, l) in results {
        channels.push(x);
        log.extend(l);
    }
    Ok(CleanRecording {
        recording: r.with_channels(channels),
        log,
    })
}
