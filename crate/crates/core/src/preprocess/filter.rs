//! Zero-phase Butterworth bandpass.
//!
//! A second-order high-pass at `lo` cascaded with a second-order low-pass at
//! `hi` (fourth order overall), run forward and then backward. The signal is
//! extended by odd reflection and each section starts in its steady state for
//! the first padded sample, so constant offsets produce no start-up transient.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Recording;
use crate::scalar::Scalar;

/// Normalized (`a0 = 1`) second-order section, transposed direct form II.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<T> {
    pub b: [T; 3],
    pub a: [T; 2],
}

impl<T: Scalar> Biquad<T> {
    fn rbj(f0: f64, fs: f64, highpass: bool) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * f0 / fs;
        let (s, c) = w0.sin_cos();
        let alpha = s / 2f64.sqrt(); // Q = 1/sqrt(2)
        let a0 = 1.0 + alpha;
        let b = if highpass {
            [(1.0 + c) / 2.0, -(1.0 + c), (1.0 + c) / 2.0]
        } else {
            [(1.0 - c) / 2.0, 1.0 - c, (1.0 - c) / 2.0]
        };
        Self {
            b: b.map(|v| T::lit(v / a0)),
            a: [T::lit(-2.0 * c / a0), T::lit((1.0 - alpha) / a0)],
        }
    }

    pub fn butter_highpass(f0: f64, fs: f64) -> Self {
        Self::rbj(f0, fs, true)
    }

    pub fn butter_lowpass(f0: f64, fs: f64) -> Self {
        Self::rbj(f0, fs, false)
    }

    /// Gain at DC.
    pub fn dc_gain(&self) -> T {
        (self.b[0] + self.b[1] + self.b[2]) / (T::one() + self.a[0] + self.a[1])
    }

    /// Filters `x` in place, starting from the steady state for input `x[0]`.
    fn run(&self, x: &mut [T]) {
        let Some(&x0) = x.first() else { return };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let y0 = self.dc_gain() * x0;
        let mut z2 = b2 * x0 - a2 * y0;
        let mut z1 = b1 * x0 - a1 * y0 + z2;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + z1;
            z1 = b1 * input - a1 * y + z2;
            z2 = b2 * input - a2 * y;
            *v = y;
        }
    }
}

/// Bandpass design: high-pass section followed by low-pass section.
#[derive(Debug, Clone, PartialEq)]
pub struct Bandpass<T> {
    sections: [Biquad<T>; 2],
    pad: usize,
}

impl<T: Scalar> Bandpass<T> {
    pub fn new(lo: f64, hi: f64, fs: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi && hi < fs / 2.0) {
            return Err(Error::invalid_arg(format!(
                "bandpass edges must satisfy 0 < lo < hi < fs/2 = {}, got lo={lo}, hi={hi}",
                fs / 2.0
            )));
        }
        Ok(Self {
            sections: [Biquad::butter_highpass(lo, fs), Biquad::butter_lowpass(hi, fs)],
            // roughly three time constants of the slowest pole
            pad: (3.0 * fs / lo).ceil() as usize,
        })
    }

    fn cascade(&self, x: &mut [T]) {
        for s in &self.sections {
            s.run(x);
        }
    }

    /// Forward-backward filtering; output has the input's length.
    pub fn filtfilt(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        if n < 2 {
            return x.to_vec();
        }
        let pad = self.pad.min(n - 1);
        let two = T::lit(2.0);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| two * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| two * x[n - 1] - x[n - 1 - i]));
        self.cascade(&mut ext);
        ext.reverse();
        self.cascade(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }
}

/// Zero-phase bandpass of every channel.
pub fn bandpass<T: Scalar>(r: &Recording<T>, lo: f64, hi: f64) -> Result<Recording<T>> {
    let f = Bandpass::new(lo, hi, f64::from(r.fs()))?;
    let channels = r.channels().par_iter().map(|ch| f.filtfilt(ch)).collect();
    Ok(r.with_channels(channels))
}
