//! Aperiodic complex correlation.
//!
//! Convention: `R_{x,y}[k] = Σ_m x[m]·conj(y[m+k])` for
//! `k = −(P−1) ..= Q−1`, stored in ascending lag order with
//! `zero_lag_index = P − 1`. Two routes compute it: a direct double sum that
//! doubles as the oracle, and a zero-padded FFT route for long inputs.

use crate::error::{arg, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

/// dB value reported for an exact zero.
pub const DB_FLOOR: f64 = -300.0;

/// Below this many multiply-adds the direct sum beats the FFT route.
const DIRECT_WORK_LIMIT: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSequence {
    pub values: Vec<Complex64>,
    pub zero_lag_index: usize,
}

impl ComplexSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at signed lag `k`; zero outside the stored support.
    pub fn at_lag(&self, k: isize) -> Complex64 {
        let idx = self.zero_lag_index as isize + k;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    pub fn min_lag(&self) -> isize {
        -(self.zero_lag_index as isize)
    }

    pub fn max_lag(&self) -> isize {
        self.values.len() as isize - 1 - self.zero_lag_index as isize
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            zero_lag_index: self.zero_lag_index,
        }
    }
}

fn check_nonempty(x: &[Complex64], y: &[Complex64]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return arg("correlation inputs must be non-empty");
    }
    Ok(())
}

/// O(P·Q) reference implementation.
pub fn xcorr_direct(x: &[Complex64], y: &[Complex64]) -> Result<ComplexSequence> {
    check_nonempty(x, y)?;
    let (p, q) = (x.len(), y.len());
    let mut values = vec![Complex64::new(0.0, 0.0); p + q - 1];
    for (m, &xm) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            // k = j - m, stored at k + p - 1
            values[j + p - 1 - m] += xm * yj.conj();
        }
    }
    Ok(ComplexSequence {
        values,
        zero_lag_index: p - 1,
    })
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(len), p.plan_fft_inverse(len))
    })
}

/// FFT route, zero-padded to the next power of two `≥ P+Q−1`.
pub fn xcorr_fft(x: &[Complex64], y: &[Complex64]) -> Result<ComplexSequence> {
    check_nonempty(x, y)?;
    let (p, q) = (x.len(), y.len());
    let out_len = p + q - 1;
    let nfft = out_len.next_power_of_two();
    let (fwd, inv) = plans(nfft);

    let zero = Complex64::new(0.0, 0.0);
    let mut xf = vec![zero; nfft];
    xf[..p].copy_from_slice(x);
    let mut yf = vec![zero; nfft];
    yf[..q].copy_from_slice(y);
    fwd.process(&mut xf);
    fwd.process(&mut yf);
    // c[n] = Σ_m y[m+n]·conj(x[m]) circularly, and R[k] = conj(c[k])
    for (a, b) in yf.iter_mut().zip(&xf) {
        *a *= b.conj();
    }
    inv.process(&mut yf);
    let scale = 1.0 / nfft as f64;
    let values = (0..out_len)
        .map(|i| {
            let k = i as isize - (p as isize - 1);
            let idx = k.rem_euclid(nfft as isize) as usize;
            yf[idx].conj() * scale
        })
        .collect();
    Ok(ComplexSequence {
        values,
        zero_lag_index: p - 1,
    })
}

/// Full aperiodic cross-correlation; picks the faster route by size.
pub fn xcorr_full(x: &[Complex64], y: &[Complex64]) -> Result<ComplexSequence> {
    if x.len().saturating_mul(y.len()) <= DIRECT_WORK_LIMIT {
        xcorr_direct(x, y)
    } else {
        xcorr_fft(x, y)
    }
}

/// Matched-filter output `M(τ) = Σ_m x[m+τ]·conj(r[m])`, delay-positive:
/// an echo of `r` starting at sample `τ0` of `x` peaks at `τ = τ0`.
/// Lags run `−(|r|−1) ..= |x|−1`, `zero_lag_index = |r| − 1`.
pub fn matched_filter(x: &[Complex64], reference: &[Complex64]) -> Result<ComplexSequence> {
    let mut r = xcorr_full(x, reference)?;
    r.values.reverse();
    r.zero_lag_index = reference.len() - 1;
    Ok(r)
}

/// Peak cross-correlation `max_k |R_{u,d}[k]| / mainlobe_scale`.
pub fn chip_ccp(u: &[Complex64], d: &[Complex64], mainlobe_scale: f64) -> Result<f64> {
    if mainlobe_scale.is_nan() || mainlobe_scale <= 0.0 {
        return arg(format!(
            "mainlobe scale must be positive, got {mainlobe_scale}"
        ));
    }
    Ok(xcorr_full(u, d)?.peak_magnitude() / mainlobe_scale)
}

/// `20·log10(ratio)`, with 0 mapped to [`DB_FLOOR`].
pub fn to_db(ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio < 0.0 {
        return arg(format!(
            "dB conversion needs a nonnegative ratio, got {ratio}"
        ));
    }
    Ok(magnitude_db(ratio))
}

/// [`to_db`] for values known to be magnitudes; never fails.
pub fn magnitude_db(mag: f64) -> f64 {
    if mag > 0.0 {
        (20.0 * mag.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Inverse of [`magnitude_db`].
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Largest elementwise difference divided by the larger peak of the two.
pub fn max_relative_difference(a: &ComplexSequence, b: &ComplexSequence) -> f64 {
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let peak = a.peak_magnitude().max(b.peak_magnitude());
    if peak == 0.0 {
        diff
    } else {
        diff / peak
    }
}
