//! Per-channel family extractors.
//!
//! Every extractor takes one channel of one epoch and returns its family's
//! values in registry order. Divisions are guarded so degenerate inputs
//! (flat signals, empty bands) produce finite output.

use serde::{Deserialize, Serialize};

use super::ar::yule_walker;
use super::dwt::dwt;
use super::registry::FeatureRegistry;
use super::spectrum::Periodogram;
use crate::error::{Error, Result};
use crate::scalar::{mean, variance, Scalar};

/// Guard added to ratio denominators.
pub const RATIO_EPS: f64 = 1e-12;

/// Frequency band edges in Hz, half-open `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandEdges {
    pub delta: [f64; 2],
    pub theta: [f64; 2],
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl Default for BandEdges {
    fn default() -> Self {
        Self {
            delta: [0.5, 4.0],
            theta: [4.0, 8.0],
            alpha: [8.0, 13.0],
            beta: [13.0, 30.0],
        }
    }
}

impl BandEdges {
    pub fn as_array(&self) -> [[f64; 2]; 4] {
        [self.delta, self.theta, self.alpha, self.beta]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in ["delta", "theta", "alpha", "beta"].iter().zip(self.as_array()) {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
                return Err(Error::invalid_arg(format!("{name} band edges must satisfy 0 <= lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Parameters shared by all extractors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub fs: u32,
    /// Samples per epoch.
    pub epoch_len: usize,
    pub bands: BandEdges,
    pub wavelet_levels: usize,
    pub ar_order: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            fs: crate::model::DEFAULT_FS,
            epoch_len: crate::model::DEFAULT_FS as usize,
            bands: BandEdges::default(),
            wavelet_levels: 4,
            ar_order: super::registry::CANONICAL_AR_ORDER,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fs == 0 {
            return Err(Error::invalid_arg("fs must be positive"));
        }
        if self.epoch_len < super::dwt::DB4_LEN {
            return Err(Error::invalid_arg(format!("epoch length {} too short", self.epoch_len)));
        }
        if self.wavelet_levels == 0 {
            return Err(Error::invalid_arg("wavelet levels must be >= 1"));
        }
        if self.ar_order >= self.epoch_len {
            return Err(Error::invalid_arg("AR order must be below the epoch length"));
        }
        self.bands.validate()
    }

    fn check_len<T>(&self, x: &[T]) -> Result<()> {
        if x.len() != self.epoch_len {
            return Err(Error::DimensionMismatch {
                expected: self.epoch_len,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

fn guarded_div<T: Scalar>(num: T, den: T) -> T {
    num / (den + T::lit(RATIO_EPS))
}

fn diff<T: Scalar>(x: &[T]) -> Vec<T> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

fn median<T: Scalar>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / T::lit(2.0)
    }
}

/// Mean, median, std, skewness, excess kurtosis, min, max (biased moments).
pub fn extract_statistical<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 7]> {
    cfg.check_len(x)?;
    let m = mean(x);
    let n = T::from_count(x.len());
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    for &v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skew, kurt) = if m2 > T::zero() {
        (m3 / m2.powf(T::lit(1.5)), m4 / (m2 * m2) - T::lit(3.0))
    } else {
        (T::zero(), T::zero())
    };
    let min = x.iter().copied().fold(T::infinity(), T::min);
    let max = x.iter().copied().fold(T::neg_infinity(), T::max);
    Ok([m, median(x), m2.sqrt(), skew, kurt, min, max])
}

/// Max and mean absolute value of the first and second differences.
pub fn extract_derivative<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 4]> {
    cfg.check_len(x)?;
    let d1 = diff(x);
    let d2 = diff(&d1);
    let stats = |d: &[T]| {
        let abs: Vec<T> = d.iter().map(|v| v.abs()).collect();
        (abs.iter().copied().fold(T::zero(), T::max), mean(&abs))
    };
    let (max1, mean1) = stats(&d1);
    let (max2, mean2) = stats(&d2);
    Ok([max1, mean1, max2, mean2])
}

/// Interior local extrema: indices where the first difference strictly changes sign.
/// Returns `(index, is_maximum)` in time order.
pub fn vertices<T: Scalar>(x: &[T]) -> Vec<(usize, bool)> {
    let d = diff(x);
    let mut out = Vec::new();
    for i in 1..d.len() {
        let (before, after) = (d[i - 1], d[i]);
        if before > T::zero() && after < T::zero() {
            out.push((i, true));
        } else if before < T::zero() && after > T::zero() {
            out.push((i, false));
        }
    }
    out
}

/// Sign changes between consecutive samples, treating zero as non-negative.
pub fn zero_crossings<T: Scalar>(x: &[T]) -> usize {
    x.windows(2)
        .filter(|w| (w[0] >= T::zero()) != (w[1] >= T::zero()))
        .count()
}

/// Vertex-to-vertex statistics, extremum and zero-crossing counts, range,
/// coefficient of variation and line length.
pub fn extract_interval<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 11]> {
    cfg.check_len(x)?;
    let fs = T::from_u32(cfg.fs).expect("fs representable");
    let v = vertices(x);
    let mut amps = Vec::with_capacity(v.len());
    let mut slopes = Vec::with_capacity(v.len());
    let mut times = Vec::with_capacity(v.len());
    for w in v.windows(2) {
        let (i0, i1) = (w[0].0, w[1].0);
        let rise = x[i1] - x[i0];
        let dt = T::from_count(i1 - i0) / fs;
        amps.push(rise.abs());
        slopes.push(rise / dt);
        times.push(dt);
    }
    let n_max = v.iter().filter(|(_, is_max)| *is_max).count();
    let n_min = v.len() - n_max;
    let min = x.iter().copied().fold(T::infinity(), T::min);
    let max = x.iter().copied().fold(T::neg_infinity(), T::max);
    let std = variance(x).sqrt();
    let line_length: T = x.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok([
        mean(&amps),
        variance(&amps),
        mean(&slopes),
        variance(&slopes),
        mean(&times),
        T::from_count(n_min),
        T::from_count(n_max),
        T::from_count(zero_crossings(x)),
        max - min,
        std / (mean(x).abs() + T::lit(RATIO_EPS)),
        line_length,
    ])
}

fn mobility<T: Scalar>(var_x: T, var_dx: T) -> T {
    if var_x > T::zero() {
        (var_dx / var_x).sqrt()
    } else {
        T::zero()
    }
}

/// Hjorth activity, mobility and complexity.
pub fn extract_hjorth<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 3]> {
    cfg.check_len(x)?;
    let d1 = diff(x);
    let d2 = diff(&d1);
    let (v0, v1, v2) = (variance(x), variance(&d1), variance(&d2));
    let mob = mobility(v0, v1);
    let mob_d = mobility(v1, v2);
    let complexity = if mob > T::zero() { mob_d / mob } else { T::zero() };
    Ok([v0, mob, complexity])
}

/// Band max and mean periodogram power for delta/theta/alpha/beta, then the
/// delta/theta, delta/alpha, theta/alpha, beta/alpha and slow/fast ratios of
/// band mean powers.
pub fn extract_spectral<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 13]> {
    cfg.check_len(x)?;
    spectral_with(x, cfg, &Periodogram::new(cfg.epoch_len)?)
}

fn spectral_with<T: Scalar>(x: &[T], cfg: &FeatureConfig, est: &Periodogram<T>) -> Result<[T; 13]> {
    let s = est.compute(x, f64::from(cfg.fs))?;
    let mut maxes = [T::zero(); 4];
    let mut means = [T::zero(); 4];
    for (b, [lo, hi]) in cfg.bands.as_array().into_iter().enumerate() {
        let bins = &s.power[s.band_bins(lo, hi)];
        if !bins.is_empty() {
            maxes[b] = bins.iter().copied().fold(T::zero(), T::max);
            means[b] = mean(bins);
        }
    }
    let [delta, theta, alpha, beta] = means;
    Ok([
        maxes[0],
        maxes[1],
        maxes[2],
        maxes[3],
        delta,
        theta,
        alpha,
        beta,
        guarded_div(delta, theta),
        guarded_div(delta, alpha),
        guarded_div(theta, alpha),
        guarded_div(beta, alpha),
        guarded_div(delta + theta, alpha + beta),
    ])
}

/// Shannon entropy (natural log) of the normalized squared coefficients.
pub fn wavelet_entropy<T: Scalar>(coeffs: &[T]) -> T {
    let total: T = coeffs.iter().map(|&c| c * c).sum();
    if total <= T::zero() {
        return T::zero();
    }
    -coeffs
        .iter()
        .map(|&c| {
            let p = c * c / total;
            if p > T::zero() {
                p * p.ln()
            } else {
                T::zero()
            }
        })
        .sum::<T>()
}

fn coeff_stats<T: Scalar>(c: &[T]) -> [T; 4] {
    let energy = c.iter().map(|&v| v * v).sum();
    [mean(c), variance(c).sqrt(), energy, wavelet_entropy(c)]
}

/// Mean, std, energy and entropy of the approximation coefficients, then the
/// same over all detail levels concatenated.
pub fn extract_wavelet<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<[T; 8]> {
    cfg.check_len(x)?;
    let d = dwt(x, cfg.wavelet_levels)?;
    let a = coeff_stats(&d.approx);
    let det = coeff_stats(&d.concat_details());
    Ok([a[0], a[1], a[2], a[3], det[0], det[1], det[2], det[3]])
}

/// Yule-Walker AR coefficients of order `cfg.ar_order`.
pub fn extract_ar<T: Scalar>(x: &[T], cfg: &FeatureConfig) -> Result<Vec<T>> {
    cfg.check_len(x)?;
    Ok(yule_walker(x, cfg.ar_order))
}

/// Runs all families on single channels, reusing the FFT plan.
#[derive(Debug, Clone)]
pub struct ChannelExtractor<T: Scalar> {
    cfg: FeatureConfig,
    registry: FeatureRegistry,
    periodogram: Periodogram<T>,
}

impl<T: Scalar> ChannelExtractor<T> {
    pub fn new(cfg: FeatureConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            registry: FeatureRegistry::with_ar_order(cfg.ar_order),
            periodogram: Periodogram::new(cfg.epoch_len)?,
            cfg,
        })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    /// All features for one channel, in registry order.
    pub fn extract(&self, x: &[T]) -> Result<Vec<T>> {
        let cfg = &self.cfg;
        let mut out = Vec::with_capacity(self.registry.len());
        out.extend(extract_statistical(x, cfg)?);
        out.extend(extract_derivative(x, cfg)?);
        out.extend(extract_interval(x, cfg)?);
        out.extend(extract_hjorth(x, cfg)?);
        out.extend(spectral_with(x, cfg, &self.periodogram)?);
        out.extend(extract_wavelet(x, cfg)?);
        out.extend(extract_ar(x, cfg)?);
        debug_assert_eq!(out.len(), self.registry.len());
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_data(format!(
                "feature {} is not finite",
                self.registry.descriptors()[i].name
            )));
        }
        Ok(out)
    }
}
