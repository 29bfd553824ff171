//! One-sided rectangular-window periodogram.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Power per frequency bin, `fs / n` Hz apart from 0 up to `fs / 2`.
///
/// Scaled so the bins sum to the mean square of the signal: a sinusoid of
/// amplitude `A` on an exact bin contributes `A^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub resolution_hz: f64,
    pub power: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn freq(&self, bin: usize) -> f64 {
        bin as f64 * self.resolution_hz
    }

    /// Bin indices with `lo <= f < hi`.
    pub fn band_bins(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = (lo / self.resolution_hz - 1e-9).ceil().max(0.0) as usize;
        let end = (hi / self.resolution_hz - 1e-9).ceil().max(0.0) as usize;
        start.min(self.power.len())..end.min(self.power.len())
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.power.iter().enumerate() {
            if p > self.power[best] {
                best = i;
            }
        }
        best
    }
}

/// Periodogram estimator with a cached FFT plan for one signal length.
#[derive(Clone)]
pub struct Periodogram<T: Scalar> {
    len: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Periodogram<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Periodogram").field("len", &self.len).finish()
    }
}

impl<T: Scalar> Periodogram<T> {
    pub fn new(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::invalid_arg("periodogram needs at least two samples"));
        }
        let fft = FftPlanner::new().plan_fft_forward(len);
        Ok(Self { len, fft })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn compute(&self, x: &[T], fs: f64) -> Result<Spectrum<T>> {
        if x.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: x.len(),
            });
        }
        let n = self.len;
        let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft.process(&mut buf);
        let n_t = T::from_count(n);
        let norm = n_t * n_t;
        let two = T::lit(2.0);
        let half = n / 2;
        let power = (0..=half)
            .map(|k| {
                let p = buf[k].norm_sqr() / norm;
                // DC and (for even n) Nyquist have no mirrored twin
                if k == 0 || (n.is_multiple_of(2) && k == half) {
                    p
                } else {
                    two * p
                }
            })
            .collect();
        Ok(Spectrum {
            resolution_hz: fs / n as f64,
            power,
        })
    }
}

pub fn periodogram<T: Scalar>(x: &[T], fs: f64) -> Result<Spectrum<T>> {
    Periodogram::new(x.len())?.compute(x, fs)
}
