//! Periodized Daubechies-4 discrete wavelet transform.
//!
//! The filter bank is orthonormal and applied with circular boundary
//! handling, so analysis is an orthogonal map: it conserves energy and its
//! transpose is the exact inverse. Inputs whose length is not a multiple of
//! `2^levels` are first extended by half-sample symmetric reflection.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Daubechies-4 (eight-tap, four vanishing moments) decomposition low-pass filter.
pub const DB4_DEC_LO: [f64; 8] = [
    -0.010597401784997278,
    0.032883011666982945,
    0.030841381835986965,
    -0.18703481171888114,
    -0.02798376941698385,
    0.6308807679295904,
    0.7148465705525415,
    0.23037781330885523,
];

pub const DB4_LEN: usize = DB4_DEC_LO.len();

/// Multilevel decomposition. `details[0]` is the finest level (cD1).
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub approx: Vec<T>,
    pub details: Vec<Vec<T>>,
    signal_len: usize,
}

impl<T: Scalar> Decomposition<T> {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Length of the original (unpadded) signal.
    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    /// True when the signal was reflected to reach a multiple of `2^levels`.
    pub fn padded(&self) -> bool {
        self.approx.len() << self.levels() != self.signal_len
    }

    pub fn approx_energy(&self) -> T {
        self.approx.iter().map(|&c| c * c).sum()
    }

    pub fn detail_energy(&self) -> T {
        self.details.iter().flatten().map(|&c| c * c).sum()
    }

    /// All detail coefficients, finest level first.
    pub fn concat_details(&self) -> Vec<T> {
        self.details.iter().flatten().copied().collect()
    }
}

fn filters<T: Scalar>() -> ([T; DB4_LEN], [T; DB4_LEN]) {
    let lo = DB4_DEC_LO.map(T::lit);
    // Quadrature mirror: g[k] = (-1)^k h[L-1-k]
    let mut hi = [T::zero(); DB4_LEN];
    for k in 0..DB4_LEN {
        let v = lo[DB4_LEN - 1 - k];
        hi[k] = if k % 2 == 0 { v } else { -v };
    }
    (lo, hi)
}

/// One analysis step on an even-length signal.
fn analyze<T: Scalar>(x: &[T], lo: &[T; DB4_LEN], hi: &[T; DB4_LEN]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let half = n / 2;
    let mut a = Vec::with_capacity(half);
    let mut d = Vec::with_capacity(half);
    for k in 0..half {
        let mut sa = T::zero();
        let mut sd = T::zero();
        for j in 0..DB4_LEN {
            let v = x[(2 * k + j) % n];
            sa += lo[j] * v;
            sd += hi[j] * v;
        }
        a.push(sa);
        d.push(sd);
    }
    (a, d)
}

fn synthesize<T: Scalar>(a: &[T], d: &[T], lo: &[T; DB4_LEN], hi: &[T; DB4_LEN]) -> Vec<T> {
    let n = a.len() * 2;
    let mut x = vec![T::zero(); n];
    for k in 0..a.len() {
        for j in 0..DB4_LEN {
            x[(2 * k + j) % n] += lo[j] * a[k] + hi[j] * d[k];
        }
    }
    x
}

fn reflect(i: usize, n: usize) -> usize {
    // half-sample symmetric: ... x1 x0 | x0 x1 ... x[n-1] | x[n-1] x[n-2] ...
    let period = 2 * n;
    let m = i % period;
    if m < n {
        m
    } else {
        period - 1 - m
    }
}

/// Multilevel Daubechies-4 analysis.
pub fn dwt<T: Scalar>(x: &[T], levels: usize) -> Result<Decomposition<T>> {
    if levels == 0 {
        return Err(Error::invalid_arg("wavelet levels must be >= 1"));
    }
    if x.len() < DB4_LEN {
        return Err(Error::invalid_arg(format!(
            "signal of length {} is shorter than the {DB4_LEN}-tap wavelet filter",
            x.len()
        )));
    }
    if levels >= usize::BITS as usize - 1 {
        return Err(Error::invalid_arg("too many wavelet levels"));
    }
    let block = 1usize << levels;
    let padded_len = x.len().div_ceil(block) * block;
    let mut cur: Vec<T> = (0..padded_len).map(|i| x[reflect(i, x.len())]).collect();

    let (lo, hi) = filters::<T>();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analyze(&cur, &lo, &hi);
        details.push(d);
        cur = a;
    }
    Ok(Decomposition {
        approx: cur,
        details,
        signal_len: x.len(),
    })
}

/// Inverse of [`dwt`], truncated to the original signal length.
pub fn idwt<T: Scalar>(dec: &Decomposition<T>) -> Vec<T> {
    let (lo, hi) = filters::<T>();
    let mut cur = dec.approx.clone();
    for d in dec.details.iter().rev() {
        cur = synthesize(&cur, d, &lo, &hi);
    }
    cur.truncate(dec.signal_len);
    cur
}
