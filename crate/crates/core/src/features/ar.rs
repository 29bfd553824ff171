//! Yule-Walker autoregressive estimation.

use crate::scalar::Scalar;

/// Biased autocorrelation of the mean-removed signal for lags `0..=max_lag`.
pub fn autocorrelation<T: Scalar>(x: &[T], max_lag: usize) -> Vec<T> {
    let n = x.len();
    let m = crate::scalar::mean(x);
    let centered: Vec<T> = x.iter().map(|&v| v - m).collect();
    let n_t = T::from_count(n.max(1));
    (0..=max_lag)
        .map(|lag| {
            if lag >= n {
                return T::zero();
            }
            centered[..n - lag]
                .iter()
                .zip(&centered[lag..])
                .map(|(&a, &b)| a * b)
                .sum::<T>()
                / n_t
        })
        .collect()
}

/// Solution of the Toeplitz normal equations by Levinson-Durbin recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonDurbin<T> {
    /// Predictor coefficients `a` with `x[n] ~ sum_k a[k] x[n-1-k]`.
    pub coeffs: Vec<T>,
    pub reflection: Vec<T>,
    pub prediction_error: T,
}

/// Runs the recursion on autocorrelation `r` (length `order + 1`).
///
/// If the prediction error collapses to zero (perfectly predictable or
/// all-zero signal) the remaining coefficients stay zero.
pub fn levinson_durbin<T: Scalar>(r: &[T], order: usize) -> LevinsonDurbin<T> {
    let mut a = vec![T::zero(); order];
    let mut reflection = vec![T::zero(); order];
    let mut err = r.first().copied().unwrap_or_else(T::zero);
    let tiny = T::epsilon() * r.first().map_or(T::zero(), |r0| r0.abs());
    for i in 0..order.min(r.len().saturating_sub(1)) {
        if err <= tiny {
            break;
        }
        let mut acc = r[i + 1];
        for j in 0..i {
            acc -= a[j] * r[i - j];
        }
        let k = acc / err;
        let prev = a.clone();
        a[i] = k;
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        reflection[i] = k;
        err *= T::one() - k * k;
    }
    LevinsonDurbin {
        coeffs: a,
        reflection,
        prediction_error: err.max(T::zero()),
    }
}

pub fn yule_walker<T: Scalar>(x: &[T], order: usize) -> Vec<T> {
    levinson_durbin(&autocorrelation(x, order), order).coeffs
}
