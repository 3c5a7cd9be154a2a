//! Independent recomputations of derived values: brute-force sums written
//! straight from the definitions, compared against the library.

use golay_dfcw::channel::{add_noise, ambiguity, snr_to_sigma, NoiseConfig};
use golay_dfcw::chips::{
    base_chip, hop_sequence, synthesize, ChipFamily, ChipSpec, SampledWaveform,
};
use golay_dfcw::correlate::xcorr_fft;
use golay_dfcw::golay::generate_golay_pair;
use golay_dfcw::receiver::{build_code_from_spec, AssembledCode};
use golay_dfcw::sets::{build_set, pairwise_cross_peaks, set_metrics, SetParams};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `(1/2L)·Σ_m x[m + t − 3L]·conj(s[m])` for `t ∈ [0, 6L)`.
fn brute_receiver(x: &[Complex64], s: &[Complex64], l: usize) -> Vec<Complex64> {
    (0..6 * l as isize)
        .map(|t| {
            let shift = t - 3 * l as isize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, sm) in s.iter().enumerate() {
                let i = m as isize + shift;
                if i >= 0 && (i as usize) < x.len() {
                    acc += x[i as usize] * sm.conj();
                }
            }
            acc / (2.0 * l as f64)
        })
        .collect()
}

fn brute_peak_xcorr(x: &[Complex64], y: &[Complex64]) -> f64 {
    let (p, q) = (x.len() as isize, y.len() as isize);
    (-(p - 1)..q)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..p {
                let j = m + k;
                if j >= 0 && j < q {
                    acc += x[m as usize] * y[j as usize].conj();
                }
            }
            acc.norm()
        })
        .fold(0.0, f64::max)
}

fn code(f: ChipFamily, m: u32, n: usize, ns: usize) -> AssembledCode {
    let (a, b) = generate_golay_pair(m).unwrap();
    build_code_from_spec(&a, &b, &base_chip(f, n, ns).unwrap()).unwrap()
}

#[test]
fn receiver_equals_brute_force_matched_filter() {
    for f in ChipFamily::ALL {
        let s = code(f, 2, 8, 4);
        let l = s.block_len();
        let want = brute_receiver(s.samples(), s.samples(), l);
        let got = s.self_output().unwrap();
        assert_eq!(got.values.len(), want.len());
        for (g, w) in got.values.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}

#[test]
fn hop_laws_by_hand() {
    // 2γ(N−1)n/N with γ = 0.24, N = 8: 0.42n
    let lfm = hop_sequence(&ChipSpec::new(ChipFamily::DfLfm, 8, 0.24, 16).unwrap());
    assert_eq!(lfm, vec![0, 0, 1, 1, 2, 2, 3, 3]);
    // canonical chip steps one bin per sub-pulse
    let canon = hop_sequence(&ChipSpec::canonical_lfm(8, 16).unwrap());
    assert_eq!(canon, (0..8).collect::<Vec<i64>>());
    // up-up second half: 7 − 1.52·(7 − n) for n = 4..7 → 2.44, 3.96, 5.48, 7
    let uu = hop_sequence(&ChipSpec::new(ChipFamily::DfPlfmUpUp, 8, 0.24, 16).unwrap());
    assert_eq!(uu, vec![0, 0, 1, 1, 2, 4, 5, 7]);
    // up-down second half: 7 − 1.33·(n − 4) for n = 4..7 → 7, 5.67, 4.34, 3.01
    let ud = hop_sequence(&ChipSpec::new(ChipFamily::DfPlfmUpDown, 8, 0.24, 16).unwrap());
    assert_eq!(ud, vec![0, 0, 1, 1, 7, 6, 4, 3]);
}

#[test]
fn chip_samples_follow_phase_law() {
    let spec = ChipSpec::new(ChipFamily::DfPlfmUpDown, 8, 0.3, 16).unwrap();
    let hops = hop_sequence(&spec);
    let w = synthesize(&spec);
    for (m, s) in w.samples.iter().enumerate() {
        let h = hops[m / 16] as f64;
        let want = Complex64::from_polar(1.0, 2.0 * PI * h * m as f64 / 16.0);
        assert!((s - want).norm() < 1e-12);
    }
}

#[test]
fn set_metrics_match_brute_force() {
    let p = SetParams::new(ChipFamily::DfPlfmUpUp, 4, 8, 0.2, 8).unwrap();
    let set = build_set(&p, 3).unwrap();
    let norm = 2.0 * (4 * p.chip_len()) as f64;
    let mut peaks = vec![];
    for i in 0..3 {
        for j in i + 1..3 {
            peaks.push(
                brute_peak_xcorr(set.members[i].code.samples(), set.members[j].code.samples())
                    / norm,
            );
        }
    }
    let lib = pairwise_cross_peaks(&set).unwrap();
    for ((_, v), w) in lib.iter().zip(&peaks) {
        assert!((v - w).abs() < 1e-12);
    }
    let m = set_metrics(&set).unwrap();
    assert!((m.mccp - peaks.iter().cloned().fold(0.0, f64::max)).abs() < 1e-12);
    assert!((m.accp - peaks.iter().sum::<f64>() / 3.0).abs() < 1e-12);
}

#[test]
fn zero_lag_cross_counts_shared_hops() {
    // distinct integer hops are orthogonal over one sub-pulse, so the
    // zero-lag cross term is (shared hops)/N and never below 1/N
    let n = 32;
    let p = SetParams::new(ChipFamily::DfLfm, 16, n, 0.24, 2 * n).unwrap();
    let set = build_set(&p, 4).unwrap();
    let cross = pairwise_cross_peaks(&set).unwrap();
    for ((i, j), peak) in cross {
        let hi = hop_sequence(&p.chip(set.members[i].slope).unwrap());
        let hj = hop_sequence(&p.chip(set.members[j].slope).unwrap());
        let shared = hi.iter().zip(&hj).filter(|(x, y)| x == y).count();
        let (x, y) = (set.members[i].code.samples(), set.members[j].code.samples());
        let zero_lag: Complex64 = x.iter().zip(y).map(|(p, q)| p * q.conj()).sum();
        let norm = 2.0 * set.members[i].code.block_len() as f64;
        assert!((zero_lag.norm() / norm - shared as f64 / n as f64).abs() < 1e-12);
        assert!(shared >= 1);
        assert!(peak >= 1.0 / n as f64 - 1e-12);
    }
}

#[test]
fn ambiguity_row_equals_brute_force() {
    let s = code(ChipFamily::DfLfm, 2, 8, 4);
    let (l, c) = (s.block_len(), s.chip_len());
    let fd = 0.05;
    let shifted: Vec<Complex64> = s
        .samples()
        .iter()
        .enumerate()
        .map(|(m, v)| v * Complex64::from_polar(1.0, 2.0 * PI * fd * m as f64 / c as f64))
        .collect();
    let want = brute_receiver(&shifted, s.samples(), l);
    let got = ambiguity(&s, &[fd]).unwrap();
    for (g, w) in got.magnitudes[0].iter().zip(&want) {
        assert!((g - w.norm()).abs() < 1e-12);
    }
}

#[test]
fn snr_definition_inverts() {
    for n_g in [4usize, 16, 64] {
        for snr in [-10.0, 0.0, 7.5, 40.0] {
            let s2 = snr_to_sigma(snr, n_g);
            assert!((20.0 * (2.0 * n_g as f64 / s2).log10() - snr).abs() < 1e-12);
        }
    }
}

#[test]
fn noise_has_requested_variance() {
    let x = SampledWaveform::new(vec![Complex64::new(0.0, 0.0); 200_000], 1.0);
    let y = add_noise(&x, &NoiseConfig::new(2.5, 9).unwrap());
    let n = y.samples.len() as f64;
    let mean: Complex64 = y.samples.iter().sum::<Complex64>() / n;
    let var = y.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
    let re = y.samples.iter().map(|v| v.re * v.re).sum::<f64>() / n;
    assert!(mean.norm() < 0.02);
    assert!((var - 2.5).abs() < 0.05);
    assert!((re - 1.25).abs() < 0.03);
}

#[test]
fn fft_engine_matches_brute_force_on_waveforms() {
    let s = code(ChipFamily::DfPlfmUpUp, 3, 8, 8);
    let chip = synthesize(&base_chip(ChipFamily::DfLfm, 8, 8).unwrap());
    let fast = xcorr_fft(s.samples(), chip.as_slice()).unwrap();
    let brute = brute_peak_xcorr(s.samples(), chip.as_slice());
    assert!((fast.peak_magnitude() - brute).abs() < 1e-9);
}
