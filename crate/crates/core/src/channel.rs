//! Noise, SNR bookkeeping, mainlobe-location RMSE Monte Carlo under
//! two-level fading, and the delay-Doppler ambiguity surface.
//!
//! SNR follows `SNR = 20·log10(2N_g/σ²)` with `2N_g` the code energy for
//! unit-energy chips. Waveforms here carry unit-magnitude samples, so a chip
//! has energy `C` and the per-sample noise variance that reproduces the same
//! matched-filter output SNR is `σ²·C`.

use crate::chips::{
    apply_fading, sinusoid_chip, synthesize, synthesize_mirror, ChipSpec, FadingProfile,
    SampledWaveform,
};
use crate::correlate::{matched_filter, ComplexSequence};
use crate::error::{arg, Result};
use crate::golay::generate_golay_pair;
use crate::receiver::{build_code, modulate, receiver, AssembledCode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// `σ² = 2N_g / 10^(snr_db/20)`.
pub fn snr_to_sigma(snr_db: f64, n_g: usize) -> f64 {
    2.0 * n_g as f64 / 10f64.powf(snr_db / 20.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseConfig {
    pub sigma_sq: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(sigma_sq: f64, seed: u64) -> Result<Self> {
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return arg(format!("noise power must be positive, got {sigma_sq}"));
        }
        Ok(Self { sigma_sq, seed })
    }
}

fn noise_into(samples: &mut [Complex64], sigma_sq: f64, rng: &mut ChaCha8Rng) {
    let sd = (sigma_sq / 2.0).sqrt();
    for s in samples {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(re * sd, im * sd);
    }
}

/// Adds circular complex Gaussian noise of total variance `σ²` per sample.
pub fn add_noise(x: &SampledWaveform, cfg: &NoiseConfig) -> SampledWaveform {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = x.clone();
    noise_into(&mut out.samples, cfg.sigma_sq, &mut rng);
    out
}

/// Independent generator for one (SNR point, trial, purpose) triple.
/// Noise and fading draws use different purposes so that runs with fading
/// on and off see the same noise.
fn substream(seed: u64, snr_index: usize, trial: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) | ((trial as u64) << 2) | purpose);
    rng
}

const NOISE_STREAM: u64 = 0;
const FADING_STREAM: u64 = 1;
const SECOND_BAND_NOISE_STREAM: u64 = 2;

/// Index of the largest magnitude, lowest index on ties.
pub fn locate_mainlobe(r: &ComplexSequence) -> usize {
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, v) in r.values.iter().enumerate() {
        let m = v.norm_sqr();
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    best
}

/// What the receiver correlates against when the channel fades.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceModel {
    /// References are the noiseless received (faded) components, i.e. the
    /// output is the autocorrelation of the faded code.
    ChannelMatched,
    /// References are the transmitted components.
    Clean,
}

/// Which signal energy an SNR value refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrReference {
    /// Energy arriving at the receiver after fading.
    Received,
    /// Unfaded code energy `2N_g`; fading then lowers the effective SNR.
    Transmitted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RmseConfig {
    pub snr_grid: Vec<f64>,
    pub trials: usize,
    pub fading_range: (f64, f64),
    pub fading_enabled: bool,
    pub seed: u64,
    pub reference: ReferenceModel,
    pub snr_reference: SnrReference,
    /// Sub-pulse boundary of the fading mask; `None` means `N/2`.
    pub fading_boundary: Option<usize>,
}

impl RmseConfig {
    pub fn new(snr_grid: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            snr_grid,
            trials,
            fading_range: (0.6, 1.0),
            fading_enabled: false,
            seed,
            reference: ReferenceModel::ChannelMatched,
            snr_reference: SnrReference::Received,
            fading_boundary: None,
        }
    }

    pub fn with_fading(&self, enabled: bool) -> Self {
        Self {
            fading_enabled: enabled,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return arg("RMSE experiment needs at least one trial");
        }
        if self.snr_grid.is_empty() || self.snr_grid.iter().any(|s| !s.is_finite()) {
            return arg("SNR grid must be non-empty and finite");
        }
        let (lo, hi) = self.fading_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return arg(format!(
                "fading range must satisfy 0 < lo <= hi <= 1, got ({lo}, {hi})"
            ));
        }
        Ok(())
    }

    fn draw_gains(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        if !self.fading_enabled {
            return (1.0, 1.0);
        }
        let (lo, hi) = self.fading_range;
        if lo == hi {
            return (lo, lo);
        }
        (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RmsePoint {
    pub snr_db: f64,
    pub rmse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RmseCurve {
    pub points: Vec<RmsePoint>,
}

impl RmseCurve {
    pub fn rmse(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rmse).collect()
    }
}

fn rms(errors: &[f64]) -> f64 {
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

/// Monte Carlo RMSE of the mainlobe position, in chips, for the code built
/// on the `2^m = n_g` Golay pair and the chip `spec`.
pub fn rmse_experiment(spec: &ChipSpec, n_g: usize, cfg: &RmseConfig) -> Result<RmseCurve> {
    cfg.validate()?;
    if !n_g.is_power_of_two() {
        return arg(format!("Golay length must be a power of two, got {n_g}"));
    }
    let (a, b) = generate_golay_pair(n_g.trailing_zeros())?;
    let big_n = spec.num_subpulses();
    let boundary = cfg.fading_boundary.unwrap_or((big_n / 2).max(1));
    let c = spec.chip_len();
    let block = n_g * c;
    let clean = build_code(&a, &b, &synthesize(spec), &synthesize_mirror(spec))?;
    let tx_energy = clean.waveform.energy();
    let truth = 3 * block;

    let trial = |snr_index: usize, snr_db: f64, t: usize| -> Result<f64> {
        let mut frng = substream(cfg.seed, snr_index, t, FADING_STREAM);
        let (g1, g2) = cfg.draw_gains(&mut frng);
        let rx = if cfg.fading_enabled {
            let profile = FadingProfile::new(g1, g2, boundary)?;
            build_code(
                &a,
                &b,
                &apply_fading(spec, &profile, false)?,
                &apply_fading(spec, &profile, true)?,
            )?
        } else {
            clean.clone()
        };
        let mut var = snr_to_sigma(snr_db, n_g) * c as f64;
        if cfg.snr_reference == SnrReference::Received {
            var *= rx.waveform.energy() / tx_energy;
        }
        let mut x = rx.waveform.samples.clone();
        noise_into(
            &mut x,
            var,
            &mut substream(cfg.seed, snr_index, t, NOISE_STREAM),
        );
        let refs = match cfg.reference {
            ReferenceModel::ChannelMatched => &rx,
            ReferenceModel::Clean => &clean,
        };
        let out = receiver(&x, refs.a_wave(), refs.b_wave(), n_g, c)?.combined;
        Ok((locate_mainlobe(&out) as f64 - truth as f64) / c as f64)
    };

    let points = cfg
        .snr_grid
        .iter()
        .enumerate()
        .map(|(si, &snr)| {
            let errors = (0..cfg.trials)
                .into_par_iter()
                .map(|t| trial(si, snr, t))
                .collect::<Result<Vec<f64>>>()?;
            Ok(RmsePoint {
                snr_db: snr,
                rmse: rms(&errors),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RmseCurve { points })
}

/// Baseline: classical two-band Golay pair with sinusoid chips of
/// `chip_len` samples. Band 1 carries `a`, band 2 carries `b`; each band
/// fades by its own gain and the two matched-filter outputs are summed.
pub fn classical_pair_rmse(n_g: usize, chip_len: usize, cfg: &RmseConfig) -> Result<RmseCurve> {
    classical_pair_rmse_with(n_g, chip_len, cfg, None)
}

/// [`classical_pair_rmse`] with the option of forcing both band gains to
/// one shared draw.
pub fn classical_pair_rmse_with(
    n_g: usize,
    chip_len: usize,
    cfg: &RmseConfig,
    force_equal_gains: Option<bool>,
) -> Result<RmseCurve> {
    cfg.validate()?;
    if !n_g.is_power_of_two() || chip_len == 0 {
        return arg("classical baseline needs a power-of-two N_g and a positive chip length");
    }
    let (a, b) = generate_golay_pair(n_g.trailing_zeros())?;
    let chip = sinusoid_chip(chip_len);
    let aw = modulate(&a, &chip).samples;
    let bw = modulate(&b, &chip).samples;
    let block = n_g * chip_len;
    let truth = block - 1;
    let equal = force_equal_gains.unwrap_or(false);

    let trial = |snr_index: usize, snr_db: f64, t: usize| -> Result<f64> {
        let mut frng = substream(cfg.seed, snr_index, t, FADING_STREAM);
        let (g1, mut g2) = cfg.draw_gains(&mut frng);
        if equal {
            g2 = g1;
        }
        let mut var = snr_to_sigma(snr_db, n_g) * chip_len as f64;
        if cfg.snr_reference == SnrReference::Received {
            var *= (g1 * g1 + g2 * g2) / 2.0;
        }
        let mut y1: Vec<Complex64> = aw.iter().map(|x| x * g1).collect();
        let mut y2: Vec<Complex64> = bw.iter().map(|x| x * g2).collect();
        noise_into(
            &mut y1,
            var,
            &mut substream(cfg.seed, snr_index, t, NOISE_STREAM),
        );
        noise_into(
            &mut y2,
            var,
            &mut substream(cfg.seed, snr_index, t, SECOND_BAND_NOISE_STREAM),
        );
        let (ra, rb) = match cfg.reference {
            ReferenceModel::ChannelMatched => (
                aw.iter().map(|x| x * g1).collect::<Vec<_>>(),
                bw.iter().map(|x| x * g2).collect::<Vec<_>>(),
            ),
            ReferenceModel::Clean => (aw.clone(), bw.clone()),
        };
        let m1 = matched_filter(&y1, &ra)?;
        let m2 = matched_filter(&y2, &rb)?;
        let sum = ComplexSequence {
            values: m1
                .values
                .iter()
                .zip(&m2.values)
                .map(|(p, q)| p + q)
                .collect(),
            zero_lag_index: m1.zero_lag_index,
        };
        Ok((locate_mainlobe(&sum) as f64 - truth as f64) / chip_len as f64)
    };

    let points = cfg
        .snr_grid
        .iter()
        .enumerate()
        .map(|(si, &snr)| {
            let errors = (0..cfg.trials)
                .into_par_iter()
                .map(|t| trial(si, snr, t))
                .collect::<Result<Vec<f64>>>()?;
            Ok(RmsePoint {
                snr_db: snr,
                rmse: rms(&errors),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RmseCurve { points })
}

/// `count` evenly spaced Doppler values over `[lo, hi]`.
pub fn doppler_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// 41 points over `f_d·T ∈ [−0.1, 0.1]`.
pub fn default_doppler_grid() -> Vec<f64> {
    doppler_grid(-0.1, 0.1, 41)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmbiguitySurface {
    pub doppler_grid: Vec<f64>,
    /// One row per Doppler value, `6·N_g·C` normalized magnitudes each.
    pub magnitudes: Vec<Vec<f64>>,
}

/// `s` shifted by `f_d·T` cycles per chip duration (phase `2π·f_d·T·m/C`).
pub fn doppler_shift(s: &[Complex64], fd_t: f64, chip_len: usize) -> Vec<Complex64> {
    s.iter()
        .enumerate()
        .map(|(m, &x)| x * Complex64::from_polar(1.0, 2.0 * PI * fd_t * m as f64 / chip_len as f64))
        .collect()
}

pub fn ambiguity(s: &AssembledCode, doppler_grid: &[f64]) -> Result<AmbiguitySurface> {
    if doppler_grid.is_empty() {
        return arg("Doppler grid must be non-empty");
    }
    let magnitudes = doppler_grid
        .par_iter()
        .map(|&fd| {
            let x = if fd == 0.0 {
                s.samples().to_vec()
            } else {
                doppler_shift(s.samples(), fd, s.chip_len())
            };
            Ok(
                receiver(&x, s.a_wave(), s.b_wave(), s.code_len(), s.chip_len())?
                    .combined
                    .magnitudes(),
            )
        })
        .collect::<Result<_>>()?;
    Ok(AmbiguitySurface {
        doppler_grid: doppler_grid.to_vec(),
        magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chips::ChipFamily;
    use crate::golay::golay_pair_of_length;
    use crate::receiver::{build_code_from_spec, region_report};

    #[test]
    fn snr_examples() {
        assert_eq!(snr_to_sigma(0.0, 16), 32.0);
        assert!((snr_to_sigma(20.0, 16) - 3.2).abs() < 1e-12);
        assert!((snr_to_sigma(-20.0, 8) - 160.0).abs() < 1e-12);
    }

    #[test]
    fn noise_config_validation() {
        assert!(NoiseConfig::new(0.0, 1).is_err());
        assert!(NoiseConfig::new(f64::NAN, 1).is_err());
        assert!(NoiseConfig::new(1.0, 1).is_ok());
    }

    #[test]
    fn noise_is_deterministic_and_vanishes() {
        let x = SampledWaveform::new(vec![Complex64::new(1.0, -1.0); 64], 1.0);
        let cfg = NoiseConfig::new(0.5, 42).unwrap();
        assert_eq!(add_noise(&x, &cfg), add_noise(&x, &cfg));
        assert_ne!(
            add_noise(&x, &cfg),
            add_noise(&x, &NoiseConfig::new(0.5, 43).unwrap())
        );
        let tiny = add_noise(&x, &NoiseConfig::new(1e-300, 7).unwrap());
        for (a, b) in tiny.samples.iter().zip(&x.samples) {
            assert!((a - b).norm() < 1e-140);
        }
    }

    #[test]
    fn noise_variance_statistics() {
        let n = 1_000_000;
        let x = SampledWaveform::new(vec![Complex64::new(0.0, 0.0); n], 1.0);
        let sigma_sq = 2.5;
        let y = add_noise(&x, &NoiseConfig::new(sigma_sq, 9).unwrap());
        let var = y.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var / sigma_sq - 1.0).abs() < 0.01, "{var}");
        let var_re = y.samples.iter().map(|s| s.re * s.re).sum::<f64>() / n as f64;
        assert!((var_re / (sigma_sq / 2.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn locate_examples() {
        let (a, b) = golay_pair_of_length(8).unwrap();
        let spec = ChipSpec::canonical_lfm(16, 8).unwrap();
        let s = build_code_from_spec(&a, &b, &spec).unwrap();
        let mut out = s.self_output().unwrap();
        assert_eq!(locate_mainlobe(&out), 3 * 8 * 128);
        out.values[17] = Complex64::new(0.0, 2.0);
        assert_eq!(locate_mainlobe(&out), 17);
        let tie = ComplexSequence {
            values: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            zero_lag_index: 0,
        };
        assert_eq!(locate_mainlobe(&tie), 0);
    }

    #[test]
    fn rmse_config_validation() {
        let mut cfg = RmseConfig::new(vec![0.0], 0, 1);
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        assert!(cfg.validate().is_ok());
        cfg.fading_range = (0.0, 1.0);
        assert!(cfg.validate().is_err());
        cfg.fading_range = (0.9, 0.8);
        assert!(cfg.validate().is_err());
        cfg.fading_range = (0.6, 1.0);
        cfg.snr_grid.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn high_snr_rmse_is_zero() {
        let spec = ChipSpec::canonical_lfm(8, 8).unwrap();
        let cfg = RmseConfig::new(vec![60.0, 80.0], 8, 3);
        for c in [cfg.clone(), cfg.with_fading(true)] {
            let curve = rmse_experiment(&spec, 8, &c).unwrap();
            assert!(curve.rmse().iter().all(|&r| r == 0.0));
        }
        let curve = classical_pair_rmse(8, 8, &cfg).unwrap();
        assert!(curve.rmse().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn rmse_is_reproducible() {
        let spec = ChipSpec::new(ChipFamily::DfPlfmUpDown, 8, 0.24, 8).unwrap();
        let cfg = RmseConfig::new(vec![-10.0, 0.0], 16, 11).with_fading(true);
        assert_eq!(
            rmse_experiment(&spec, 4, &cfg).unwrap(),
            rmse_experiment(&spec, 4, &cfg).unwrap()
        );
    }

    #[test]
    fn equal_band_gains_match_fading_off() {
        let cfg = RmseConfig::new(vec![-15.0, -10.0, -5.0, 0.0, 5.0], 40, 5);
        let off = classical_pair_rmse(8, 4, &cfg).unwrap();
        let on = classical_pair_rmse_with(8, 4, &cfg.with_fading(true), Some(true)).unwrap();
        for (x, y) in off.rmse().iter().zip(on.rmse()) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn ambiguity_zero_row_and_rotation() {
        let (a, b) = golay_pair_of_length(4).unwrap();
        let spec = ChipSpec::canonical_lfm(8, 8).unwrap();
        let s = build_code_from_spec(&a, &b, &spec).unwrap();
        let surf = ambiguity(&s, &[0.0, 0.05]).unwrap();
        let stat = s.self_output().unwrap().magnitudes();
        for (x, y) in surf.magnitudes[0].iter().zip(&stat) {
            assert!((x - y).abs() <= 1e-12);
        }
        let rot = Complex64::from_polar(1.0, 0.7);
        let mut rotated = s.clone();
        rotated.waveform.samples.iter_mut().for_each(|x| *x *= rot);
        // keep the references fixed: rotate only the received signal
        let out = receiver(
            &doppler_shift(rotated.samples(), 0.05, s.chip_len()),
            s.a_wave(),
            s.b_wave(),
            4,
            s.chip_len(),
        )
        .unwrap()
        .combined
        .magnitudes();
        for (x, y) in out.iter().zip(&surf.magnitudes[1]) {
            assert!((x - y).abs() <= 1e-12);
        }
        let rep = region_report(
            &ComplexSequence {
                values: surf.magnitudes[1]
                    .iter()
                    .map(|&m| Complex64::new(m, 0.0))
                    .collect(),
                zero_lag_index: 0,
            },
            4,
            s.chip_len(),
        )
        .unwrap();
        assert!(rep.zero_region_peak > 1e-3);
        assert!(ambiguity(&s, &[]).is_err());
        assert_eq!(default_doppler_grid().len(), 41);
        assert!((default_doppler_grid()[20]).abs() < 1e-15);
    }
}
