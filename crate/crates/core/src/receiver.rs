//! Code assembly, the two-reference matched-filter receiver and the
//! five-region decomposition of its output.
//!
//! With `L = N_g·C`, the transmitted code is `s = a ‖ 0_L ‖ b` (`3L`
//! samples). The receiver matched-filters against `a` and `b`, delays the
//! `a` branch by `2L` and adds. On the output timeline `t ∈ [0, 6L)` the
//! mainlobe sits at `t = 3L` and the regions are
//!
//! | region   | samples            |
//! |----------|--------------------|
//! | XCORR_L  | `[0, 2L)`          |
//! | ZERO_L   | `[2L, 3L − C)`     |
//! | MAIN     | `[3L − C, 3L + C)` |
//! | ZERO_R   | `[3L + C, 4L)`     |
//! | XCORR_R  | `[4L, 6L)`         |
//!
//! Every output is divided by `2L` so a noiseless mainlobe peaks at 1.

use crate::chips::{synthesize, synthesize_mirror, ChipSpec, SampledWaveform};
use crate::correlate::{matched_filter, ComplexSequence};
use crate::error::{arg, Result};
use crate::golay::BinaryCode;
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::ops::Range;

/// Block `n` of the output is `code[n]·chip`.
pub fn modulate(code: &BinaryCode, chip: &SampledWaveform) -> SampledWaveform {
    let mut samples = Vec::with_capacity(code.len() * chip.len());
    for &e in code.elements() {
        let s = e as f64;
        samples.extend(chip.samples.iter().map(|&x| x * s));
    }
    SampledWaveform::new(samples, chip.sample_period)
}

/// `a ‖ 0 ‖ b` with the component lengths kept for slicing.
#[derive(Clone, Debug, PartialEq)]
pub struct AssembledCode {
    pub waveform: SampledWaveform,
    code_len: usize,
    chip_len: usize,
}

impl AssembledCode {
    /// `N_g`.
    pub fn code_len(&self) -> usize {
        self.code_len
    }

    /// `C`, samples per chip.
    pub fn chip_len(&self) -> usize {
        self.chip_len
    }

    /// `L = N_g·C`.
    pub fn block_len(&self) -> usize {
        self.code_len * self.chip_len
    }

    pub fn a_wave(&self) -> &[Complex64] {
        &self.waveform.samples[..self.block_len()]
    }

    pub fn b_wave(&self) -> &[Complex64] {
        &self.waveform.samples[2 * self.block_len()..]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.waveform.samples
    }

    /// Receiver output of the code against its own references.
    pub fn self_output(&self) -> Result<ComplexSequence> {
        Ok(receiver(
            self.samples(),
            self.a_wave(),
            self.b_wave(),
            self.code_len,
            self.chip_len,
        )?
        .combined)
    }
}

pub fn assemble(
    a_wave: &[Complex64],
    b_wave: &[Complex64],
    n_g: usize,
    chip_len: usize,
) -> Result<AssembledCode> {
    let block = n_g * chip_len;
    if block == 0 {
        return arg("code length and chip length must be positive");
    }
    if a_wave.len() != block || b_wave.len() != block {
        return arg(format!(
            "assembly expects two blocks of {block} samples, got {} and {}",
            a_wave.len(),
            b_wave.len()
        ));
    }
    let mut samples = Vec::with_capacity(3 * block);
    samples.extend_from_slice(a_wave);
    samples.resize(2 * block, Complex64::new(0.0, 0.0));
    samples.extend_from_slice(b_wave);
    Ok(AssembledCode {
        waveform: SampledWaveform::new(samples, 1.0),
        code_len: n_g,
        chip_len,
    })
}

/// Code built from a pair and an explicit forward/mirror chip pair.
pub fn build_code(
    a: &BinaryCode,
    b: &BinaryCode,
    u: &SampledWaveform,
    d: &SampledWaveform,
) -> Result<AssembledCode> {
    if a.len() != b.len() {
        return arg("pair members must have equal length");
    }
    if u.len() != d.len() {
        return arg("forward and mirror chips must have equal length");
    }
    let mut code = assemble(
        &modulate(a, u).samples,
        &modulate(b, d).samples,
        a.len(),
        u.len(),
    )?;
    code.waveform.sample_period = u.sample_period;
    Ok(code)
}

/// Code using the forward chip of `spec` on `a` and its mirror on `b`.
pub fn build_code_from_spec(
    a: &BinaryCode,
    b: &BinaryCode,
    spec: &ChipSpec,
) -> Result<AssembledCode> {
    build_code(a, b, &synthesize(spec), &synthesize_mirror(spec))
}

/// Matched-filter branches and the delay-and-add output.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverOutput {
    /// `Σ_m x[m+τ]·conj(a[m])`, lags `−(L−1) ..= |x|−1`, divided by `2L`.
    pub r_xa: ComplexSequence,
    /// Same for the `b` reference.
    pub r_xb: ComplexSequence,
    /// `r_xa(t − 3L) + r_xb(t − L)` for `t ∈ [0, 6L)`; `zero_lag_index` is
    /// the mainlobe position `3L`.
    pub combined: ComplexSequence,
}

fn combine(r_xa: &ComplexSequence, r_xb: &ComplexSequence, block: usize) -> ComplexSequence {
    let l = block as isize;
    let values = (0..6 * l)
        .map(|t| r_xa.at_lag(t - 3 * l) + r_xb.at_lag(t - l))
        .collect();
    ComplexSequence {
        values,
        zero_lag_index: 3 * block,
    }
}

pub fn receiver(
    x: &[Complex64],
    a_ref: &[Complex64],
    b_ref: &[Complex64],
    n_g: usize,
    chip_len: usize,
) -> Result<ReceiverOutput> {
    let block = n_g * chip_len;
    if block == 0 {
        return arg("code length and chip length must be positive");
    }
    if a_ref.len() != block || b_ref.len() != block {
        return arg(format!(
            "receiver references must have {block} samples, got {} and {}",
            a_ref.len(),
            b_ref.len()
        ));
    }
    if x.is_empty() {
        return arg("receiver input is empty");
    }
    let norm = 1.0 / (2.0 * block as f64);
    let r_xa = matched_filter(x, a_ref)?.scaled(norm);
    let r_xb = matched_filter(x, b_ref)?.scaled(norm);
    let combined = combine(&r_xa, &r_xb, block);
    Ok(ReceiverOutput {
        r_xa,
        r_xb,
        combined,
    })
}

/// Matched filter against `modulate(code, chip)` computed as a chip
/// matched filter followed by a code matched filter on the `C`-sample
/// grid. Same lag convention and scale as [`matched_filter`].
pub fn matched_filter_cascade(
    x: &[Complex64],
    code: &BinaryCode,
    chip: &[Complex64],
) -> Result<ComplexSequence> {
    let c = chip.len() as isize;
    let block = code.len() * chip.len();
    let y = matched_filter(x, chip)?;
    let min_lag = -(block as isize - 1);
    let max_lag = x.len() as isize - 1;
    let values = (min_lag..=max_lag)
        .map(|tau| {
            code.elements()
                .iter()
                .enumerate()
                .map(|(n, &e)| y.at_lag(tau + n as isize * c) * e as f64)
                .sum()
        })
        .collect();
    Ok(ComplexSequence {
        values,
        zero_lag_index: block - 1,
    })
}

/// [`receiver`] built from two cascade matched filters.
pub fn receiver_cascade(
    x: &[Complex64],
    a_code: &BinaryCode,
    u: &[Complex64],
    b_code: &BinaryCode,
    d: &[Complex64],
) -> Result<ComplexSequence> {
    if a_code.len() != b_code.len() || u.len() != d.len() {
        return arg("cascade receiver needs matching code and chip lengths");
    }
    let block = a_code.len() * u.len();
    let norm = 1.0 / (2.0 * block as f64);
    let r_xa = matched_filter_cascade(x, a_code, u)?.scaled(norm);
    let r_xb = matched_filter_cascade(x, b_code, d)?.scaled(norm);
    Ok(combine(&r_xa, &r_xb, block))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    XcorrL,
    ZeroL,
    Main,
    ZeroR,
    XcorrR,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Self::XcorrL,
        Self::ZeroL,
        Self::Main,
        Self::ZeroR,
        Self::XcorrR,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::XcorrL => "XCORR_L",
            Self::ZeroL => "ZERO_L",
            Self::Main => "MAIN",
            Self::ZeroR => "ZERO_R",
            Self::XcorrR => "XCORR_R",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Boundaries `{0, 2L, 3L−C, 3L+C, 4L, 6L}` of the output timeline.
pub fn region_boundaries(n_g: usize, chip_len: usize) -> [usize; 6] {
    let l = n_g * chip_len;
    [0, 2 * l, 3 * l - chip_len, 3 * l + chip_len, 4 * l, 6 * l]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionReport {
    /// Largest magnitude inside MAIN.
    pub mainlobe_peak: f64,
    /// Global argmax (lowest index on ties).
    pub mainlobe_index: usize,
    /// Largest magnitude over ZERO_L ∪ ZERO_R.
    pub zero_region_peak: f64,
    /// Largest magnitude over XCORR_L ∪ XCORR_R.
    pub cross_region_peak: f64,
    pub cross_left_peak: f64,
    pub cross_right_peak: f64,
    /// Largest magnitude over ZERO_L ∪ MAIN ∪ ZERO_R.
    pub middle_peak: f64,
    pub region_boundaries: [usize; 6],
}

impl RegionReport {
    pub fn region_of(&self, index: usize) -> Option<Region> {
        let b = &self.region_boundaries;
        Region::ALL
            .iter()
            .enumerate()
            .find(|(i, _)| index >= b[*i] && index < b[i + 1])
            .map(|(_, r)| *r)
    }

    pub fn interval(&self, region: Region) -> Range<usize> {
        let i = Region::ALL.iter().position(|&r| r == region).unwrap();
        self.region_boundaries[i]..self.region_boundaries[i + 1]
    }

    /// Whether MAIN holds a peak above `threshold` (normalized).
    pub fn has_mainlobe(&self, threshold: f64) -> bool {
        self.mainlobe_peak > threshold
    }
}

pub fn region_report(r: &ComplexSequence, n_g: usize, chip_len: usize) -> Result<RegionReport> {
    let block = n_g * chip_len;
    if block == 0 || r.len() != 6 * block {
        return arg(format!(
            "receiver output must have 6·N_g·C = {} samples, got {}",
            6 * block,
            r.len()
        ));
    }
    let b = region_boundaries(n_g, chip_len);
    let mags = r.magnitudes();
    let peak = |range: Range<usize>| mags[range].iter().copied().fold(0.0, f64::max);
    let cross_left_peak = peak(b[0]..b[1]);
    let cross_right_peak = peak(b[4]..b[5]);
    let zero_region_peak = peak(b[1]..b[2]).max(peak(b[3]..b[4]));
    let mainlobe_peak = peak(b[2]..b[3]);
    let mut mainlobe_index = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[mainlobe_index] {
            mainlobe_index = i;
        }
    }
    Ok(RegionReport {
        mainlobe_peak,
        mainlobe_index,
        zero_region_peak,
        cross_region_peak: cross_left_peak.max(cross_right_peak),
        cross_left_peak,
        cross_right_peak,
        middle_peak: peak(b[1]..b[4]),
        region_boundaries: b,
    })
}

/// Two-band scheme: the second band carries the code built from `(−a, b)`.
/// Band outputs are weighted by the per-band gains, summed and divided by
/// 2, so unit gains give a unit mainlobe and cancel both cross regions.
pub fn two_band_sum(
    a_wave: &[Complex64],
    b_wave: &[Complex64],
    n_g: usize,
    chip_len: usize,
    gains: (f64, f64),
) -> Result<ComplexSequence> {
    let s1 = assemble(a_wave, b_wave, n_g, chip_len)?;
    let neg_a: Vec<Complex64> = a_wave.iter().map(|x| -x).collect();
    let s2 = assemble(&neg_a, b_wave, n_g, chip_len)?;
    let x1: Vec<Complex64> = s1.samples().iter().map(|x| x * gains.0).collect();
    let x2: Vec<Complex64> = s2.samples().iter().map(|x| x * gains.1).collect();
    let r1 = receiver(&x1, a_wave, b_wave, n_g, chip_len)?.combined;
    let r2 = receiver(&x2, &neg_a, b_wave, n_g, chip_len)?.combined;
    Ok(ComplexSequence {
        values: r1
            .values
            .iter()
            .zip(&r2.values)
            .map(|(p, q)| (p + q) * 0.5)
            .collect(),
        zero_lag_index: r1.zero_lag_index,
    })
}
