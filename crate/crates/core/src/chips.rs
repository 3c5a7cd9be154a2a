//! Discrete-frequency chips: hop sequences, sampled waveforms, mirrors,
//! slope families and two-level frequency-selective fading.
//!
//! A chip is `N` contiguous sub-pulses of `N_s` samples each. Sub-pulse `n`
//! sits on the integer frequency bin `f[n]`, and sample `m` is
//! `exp(i·2π·f[⌊m/N_s⌋]·m/N_s)` with absolute-time phase.

use crate::error::{arg, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChipFamily {
    DfLfm,
    DfPlfmUpUp,
    DfPlfmUpDown,
}

impl ChipFamily {
    pub const ALL: [ChipFamily; 3] = [Self::DfLfm, Self::DfPlfmUpUp, Self::DfPlfmUpDown];

    pub fn label(self) -> &'static str {
        match self {
            Self::DfLfm => "df-lfm",
            Self::DfPlfmUpUp => "df-plfm-up-up",
            Self::DfPlfmUpDown => "df-plfm-up-down",
        }
    }

    pub fn is_plfm(self) -> bool {
        !matches!(self, Self::DfLfm)
    }
}

impl fmt::Display for ChipFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ChipFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "df-lfm" | "lfm" => Ok(Self::DfLfm),
            "df-plfm-up-up" | "plfm-up-up" | "up-up" => Ok(Self::DfPlfmUpUp),
            "df-plfm-up-down" | "plfm-up-down" | "up-down" => Ok(Self::DfPlfmUpDown),
            _ => arg(format!("unknown chip family {s:?}")),
        }
    }
}

/// Symmetric (`+1`) or anti-symmetric (`−1`) mirror chip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MirrorSign {
    Plus,
    Minus,
}

impl MirrorSign {
    pub fn value(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Self::Plus),
            -1 => Ok(Self::Minus),
            _ => arg(format!("mirror sign must be +1 or -1, got {v}")),
        }
    }
}

/// Full parameterization of one chip. Built through [`ChipSpec::new`], which
/// validates every field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChipSpec {
    family: ChipFamily,
    num_subpulses: usize,
    slope: f64,
    mirror_sign: MirrorSign,
    samples_per_subpulse: usize,
    subpulse_duration: f64,
}

impl ChipSpec {
    pub fn new(
        family: ChipFamily,
        num_subpulses: usize,
        slope: f64,
        samples_per_subpulse: usize,
    ) -> Result<Self> {
        let spec = Self {
            family,
            num_subpulses,
            slope,
            mirror_sign: MirrorSign::Plus,
            samples_per_subpulse,
            subpulse_duration: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// DF-LFM chip whose hops are exactly `0, 1, …, N−1`.
    pub fn canonical_lfm(num_subpulses: usize, samples_per_subpulse: usize) -> Result<Self> {
        Self::new(
            ChipFamily::DfLfm,
            num_subpulses,
            canonical_lfm_slope(num_subpulses),
            samples_per_subpulse,
        )
    }

    pub fn with_mirror_sign(mut self, sign: MirrorSign) -> Self {
        self.mirror_sign = sign;
        self
    }

    pub fn with_subpulse_duration(mut self, dt: f64) -> Result<Self> {
        self.subpulse_duration = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_slope(&self, slope: f64) -> Result<Self> {
        let mut s = self.clone();
        s.slope = slope;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.num_subpulses == 0 {
            return arg("chip needs at least one sub-pulse");
        }
        if self.family.is_plfm() && !self.num_subpulses.is_multiple_of(2) {
            return arg(format!(
                "{} needs an even number of sub-pulses, got {}",
                self.family, self.num_subpulses
            ));
        }
        if !(self.slope > 0.0 && self.slope <= 1.0) {
            return arg(format!("slope must lie in (0, 1], got {}", self.slope));
        }
        if self.samples_per_subpulse == 0 {
            return arg("samples per sub-pulse must be positive");
        }
        if !(self.subpulse_duration.is_finite() && self.subpulse_duration > 0.0) {
            return arg(format!(
                "sub-pulse duration must be positive, got {}",
                self.subpulse_duration
            ));
        }
        Ok(())
    }

    pub fn family(&self) -> ChipFamily {
        self.family
    }
    pub fn num_subpulses(&self) -> usize {
        self.num_subpulses
    }
    pub fn slope(&self) -> f64 {
        self.slope
    }
    pub fn mirror_sign(&self) -> MirrorSign {
        self.mirror_sign
    }
    pub fn samples_per_subpulse(&self) -> usize {
        self.samples_per_subpulse
    }
    pub fn subpulse_duration(&self) -> f64 {
        self.subpulse_duration
    }
    /// Hop spacing ΔW = 1/ΔT.
    pub fn hop_spacing(&self) -> f64 {
        1.0 / self.subpulse_duration
    }
    /// Samples per chip, `C = N·N_s`.
    pub fn chip_len(&self) -> usize {
        self.num_subpulses * self.samples_per_subpulse
    }
    pub fn sample_period(&self) -> f64 {
        self.subpulse_duration / self.samples_per_subpulse as f64
    }
}

/// Base slope `k` used when none is given.
pub const DEFAULT_K: f64 = 0.24;

/// Samples per sub-pulse used when none is given: `2N`, enough that every
/// hop of every slope in the three families (at most `2N − 1`) stays below
/// the sampling rate and nothing aliases.
pub fn default_samples_per_subpulse(num_subpulses: usize) -> usize {
    2 * num_subpulses
}

/// Base chip of a family: the `f[n] = n` chip for DF-LFM, slope
/// [`DEFAULT_K`] for the PLFM families.
pub fn base_chip(
    family: ChipFamily,
    num_subpulses: usize,
    samples_per_subpulse: usize,
) -> Result<ChipSpec> {
    match family {
        ChipFamily::DfLfm => ChipSpec::canonical_lfm(num_subpulses, samples_per_subpulse),
        _ => ChipSpec::new(family, num_subpulses, DEFAULT_K, samples_per_subpulse),
    }
}

/// Slope `N/(2(N−1))` for which the DF-LFM hop law reduces to `f[n] = n`.
pub fn canonical_lfm_slope(num_subpulses: usize) -> f64 {
    if num_subpulses <= 1 {
        1.0
    } else {
        num_subpulses as f64 / (2.0 * (num_subpulses as f64 - 1.0))
    }
}

/// Complex baseband samples plus their sample period.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWaveform {
    pub samples: Vec<Complex64>,
    pub sample_period: f64,
}

impl SampledWaveform {
    pub fn new(samples: Vec<Complex64>, sample_period: f64) -> Self {
        Self {
            samples,
            sample_period,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(
            self.samples.iter().map(|&s| s * factor).collect(),
            self.sample_period,
        )
    }
}

fn round_half_away(x: f64) -> i64 {
    // f64::round rounds ties away from zero
    x.round() as i64
}

fn rising(slope: f64, n_sub: usize, n: usize) -> i64 {
    let nf = n_sub as f64;
    round_half_away(2.0 * slope * (nf - 1.0) * n as f64 / nf)
}

fn up_up_second(slope: f64, n_sub: usize, n: usize) -> i64 {
    let top = n_sub as f64 - 1.0;
    round_half_away(top - 2.0 * (1.0 - slope) * (top - n as f64))
}

fn up_down_second(slope: f64, n_sub: usize, n: usize) -> i64 {
    let nf = n_sub as f64;
    let top = nf - 1.0;
    let local = n as f64 - nf / 2.0;
    round_half_away(top - 2.0 * (1.0 - slope) * top * local / nf)
}

fn hop_at(spec: &ChipSpec, n: usize) -> i64 {
    let (k, big_n) = (spec.slope, spec.num_subpulses);
    match spec.family {
        ChipFamily::DfLfm => rising(k, big_n, n),
        _ if n < big_n / 2 => rising(k, big_n, n),
        ChipFamily::DfPlfmUpUp => up_up_second(k, big_n, n),
        ChipFamily::DfPlfmUpDown => up_down_second(k, big_n, n),
    }
}

/// Hop sequence `f[0..N]` (integer frequency bins).
pub fn hop_sequence(spec: &ChipSpec) -> Vec<i64> {
    (0..spec.num_subpulses).map(|n| hop_at(spec, n)).collect()
}

fn synthesize_hops(hops: &[i64], ns: usize, sample_period: f64) -> SampledWaveform {
    let ns_i = ns as i64;
    let samples = (0..hops.len() * ns)
        .map(|m| {
            let h = hops[m / ns];
            // reduce the integer phase numerator first to keep the angle small
            let num = (h * m as i64).rem_euclid(ns_i);
            Complex64::from_polar(1.0, 2.0 * PI * num as f64 / ns as f64)
        })
        .collect();
    SampledWaveform::new(samples, sample_period)
}

/// Forward chip `u`: `N·N_s` unit-magnitude samples.
pub fn synthesize(spec: &ChipSpec) -> SampledWaveform {
    synthesize_hops(
        &hop_sequence(spec),
        spec.samples_per_subpulse,
        spec.sample_period(),
    )
}

/// Canonical mirror `d[m] = sign·conj(u[M−m])`, `M = len − 1`.
pub fn mirror(u: &SampledWaveform, sign: MirrorSign) -> SampledWaveform {
    let s = sign.value();
    SampledWaveform::new(
        u.samples.iter().rev().map(|x| x.conj() * s).collect(),
        u.sample_period,
    )
}

/// Mirror chip for a spec, using the spec's own mirror sign.
pub fn synthesize_mirror(spec: &ChipSpec) -> SampledWaveform {
    mirror(&synthesize(spec), spec.mirror_sign)
}

/// All-ones chip of `len` samples: the plain sinusoid chip at baseband.
pub fn sinusoid_chip(len: usize) -> SampledWaveform {
    SampledWaveform::new(vec![Complex64::new(1.0, 0.0); len], 1.0 / len.max(1) as f64)
}

/// Mirror hops evaluated segment by segment from the hop law, without
/// reversing any array: the first half of the mirror runs the second
/// segment backwards and the second half runs the first segment backwards.
pub fn formula_mirror_hops(spec: &ChipSpec) -> Vec<i64> {
    let big_n = spec.num_subpulses;
    let k = spec.slope;
    (0..big_n)
        .map(|n| {
            let src = big_n - 1 - n;
            match spec.family {
                ChipFamily::DfLfm => rising(k, big_n, src),
                _ if n >= big_n / 2 => rising(k, big_n, src),
                ChipFamily::DfPlfmUpUp => up_up_second(k, big_n, src),
                ChipFamily::DfPlfmUpDown => up_down_second(k, big_n, src),
            }
        })
        .collect()
}

/// Outcome of comparing the formula-built mirror against the canonical one.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorCheck {
    pub hops_match: bool,
    /// Largest `|canonical[m] − formula[m]|` with no alignment.
    pub max_sample_deviation: f64,
    /// Samples where `canonical[m] ≠ formula[m+1]`. Where `m+1` starts a new
    /// sub-pulse both phases are zero, so a correct pair has none.
    pub shifted_mismatches: usize,
}

impl MirrorCheck {
    pub fn passed(&self) -> bool {
        self.hops_match && self.shifted_mismatches == 0
    }
}

pub fn hop_mirror_check(spec: &ChipSpec) -> MirrorCheck {
    let formula_hops = formula_mirror_hops(spec);
    let mut reversed = hop_sequence(spec);
    reversed.reverse();
    let hops_match = formula_hops == reversed;

    let ns = spec.samples_per_subpulse;
    let canonical = mirror(&synthesize(spec), MirrorSign::Plus);
    let formula = synthesize_hops(&formula_hops, ns, spec.sample_period());
    let max_sample_deviation = canonical
        .samples
        .iter()
        .zip(&formula.samples)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let shifted_mismatches = canonical
        .samples
        .iter()
        .zip(formula.samples.iter().skip(1))
        .filter(|(a, b)| (*a - *b).norm() > 1e-9)
        .count();
    MirrorCheck {
        hops_match,
        max_sample_deviation,
        shifted_mismatches,
    }
}

/// Slopes `γ_1..γ_L` of a set. DF-LFM spans `[k, 1−2k]`, PLFM spans `[k, 1−k]`.
pub fn slope_values(family: ChipFamily, count: usize, k: f64) -> Result<Vec<f64>> {
    if !(k > 0.0 && k <= 0.5) {
        return arg(format!("base slope k must lie in (0, 0.5], got {k}"));
    }
    if count == 0 {
        return arg("slope family needs at least one member");
    }
    if count == 1 {
        return Ok(vec![k]);
    }
    let span = match family {
        ChipFamily::DfLfm => 1.0 - 3.0 * k,
        _ => 1.0 - 2.0 * k,
    };
    let step = span / (count as f64 - 1.0);
    let slopes: Vec<f64> = (0..count).map(|i| k + i as f64 * step).collect();
    if step <= 0.0 {
        log::warn!(
            "{family} slopes for k = {k} are not strictly increasing ({slopes:?}); \
             set members will share or reverse bandwidth"
        );
    }
    Ok(slopes)
}

/// Two-level attenuation: sub-pulses below `boundary` get `alpha_low`,
/// the rest `alpha_high`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FadingProfile {
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub boundary: usize,
}

impl FadingProfile {
    pub fn new(alpha_low: f64, alpha_high: f64, boundary: usize) -> Result<Self> {
        for a in [alpha_low, alpha_high] {
            if !(a > 0.0 && a <= 1.0) {
                return arg(format!("fading gain must lie in (0, 1], got {a}"));
            }
        }
        if boundary == 0 {
            return arg("fading boundary must be at least 1");
        }
        Ok(Self {
            alpha_low,
            alpha_high,
            boundary,
        })
    }

    /// Profile with the boundary at the middle sub-pulse, the split used for
    /// PLFM chips.
    pub fn half_band(alpha_low: f64, alpha_high: f64, num_subpulses: usize) -> Result<Self> {
        Self::new(alpha_low, alpha_high, (num_subpulses / 2).max(1))
    }

    pub fn gain(&self, subpulse: usize) -> f64 {
        if subpulse < self.boundary {
            self.alpha_low
        } else {
            self.alpha_high
        }
    }
}

/// Faded forward chip, or faded mirror chip with the reversed mask so the
/// result is still the exact mirror of the faded forward chip.
pub fn apply_fading(
    spec: &ChipSpec,
    profile: &FadingProfile,
    is_mirror: bool,
) -> Result<SampledWaveform> {
    let big_n = spec.num_subpulses;
    if profile.boundary > big_n {
        return arg(format!(
            "fading boundary {} exceeds the {big_n} sub-pulses of the chip",
            profile.boundary
        ));
    }
    let ns = spec.samples_per_subpulse;
    let base = if is_mirror {
        synthesize_mirror(spec)
    } else {
        synthesize(spec)
    };
    let samples = base
        .samples
        .iter()
        .enumerate()
        .map(|(m, &x)| {
            let n = m / ns;
            let g = if is_mirror {
                profile.gain(big_n - 1 - n)
            } else {
                profile.gain(n)
            };
            x * g
        })
        .collect();
    Ok(SampledWaveform::new(samples, base.sample_period))
}
