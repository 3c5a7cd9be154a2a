//! Code sets built by varying chip slopes over one Golay pair, their mate
//! sets, combined and best-candidate sets, and the set quality metrics.
//!
//! All correlations are normalized by `2·N_g·C`, the same factor as a
//! single code's receiver output, so ASP, MCCP and ACCP share one scale.

use crate::chips::{slope_values, ChipFamily, ChipSpec};
use crate::correlate::{magnitude_db, xcorr_full};
use crate::error::{arg, Result};
use crate::golay::{generate_golay_pair, mate_pair, BinaryCode};
use crate::receiver::{build_code_from_spec, receiver, region_report, AssembledCode, RegionReport};
use rayon::prelude::*;
use serde::Serialize;

/// Parameters shared by every member of a set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetParams {
    pub family: ChipFamily,
    /// Golay length, a power of two.
    pub n_g: usize,
    pub num_subpulses: usize,
    pub k: f64,
    pub samples_per_subpulse: usize,
}

impl SetParams {
    pub fn new(
        family: ChipFamily,
        n_g: usize,
        num_subpulses: usize,
        k: f64,
        samples_per_subpulse: usize,
    ) -> Result<Self> {
        if !n_g.is_power_of_two() {
            return arg(format!("Golay length must be a power of two, got {n_g}"));
        }
        if !(k > 0.0 && k <= 0.5) {
            return arg(format!("base slope k must lie in (0, 0.5], got {k}"));
        }
        ChipSpec::new(family, num_subpulses, k, samples_per_subpulse)?;
        Ok(Self {
            family,
            n_g,
            num_subpulses,
            k,
            samples_per_subpulse,
        })
    }

    pub fn chip_len(&self) -> usize {
        self.num_subpulses * self.samples_per_subpulse
    }

    pub fn golay_pair(&self) -> Result<(BinaryCode, BinaryCode)> {
        generate_golay_pair(self.n_g.trailing_zeros())
    }

    /// Chip for one member of the set at the given slope.
    pub fn chip(&self, slope: f64) -> Result<ChipSpec> {
        ChipSpec::new(
            self.family,
            self.num_subpulses,
            slope,
            self.samples_per_subpulse,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairOrigin {
    Pair,
    Mate,
}

impl PairOrigin {
    fn flipped(self) -> Self {
        match self {
            Self::Pair => Self::Mate,
            Self::Mate => Self::Pair,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetMember {
    #[serde(skip)]
    pub code: AssembledCode,
    pub slope: f64,
    pub origin: PairOrigin,
    pub a_code: BinaryCode,
    pub b_code: BinaryCode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeSet {
    pub params: SetParams,
    pub members: Vec<SetMember>,
}

impl CodeSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn member(
    params: &SetParams,
    slope: f64,
    origin: PairOrigin,
    a: &BinaryCode,
    b: &BinaryCode,
) -> Result<SetMember> {
    Ok(SetMember {
        code: build_code_from_spec(a, b, &params.chip(slope)?)?,
        slope,
        origin,
        a_code: a.clone(),
        b_code: b.clone(),
    })
}

/// `L` codes on one Golay pair, member `l` using slope `γ_l`.
pub fn build_set(params: &SetParams, count: usize) -> Result<CodeSet> {
    let (a, b) = params.golay_pair()?;
    let members = slope_values(params.family, count, params.k)?
        .into_iter()
        .map(|g| member(params, g, PairOrigin::Pair, &a, &b))
        .collect::<Result<_>>()?;
    Ok(CodeSet {
        params: params.clone(),
        members,
    })
}

/// Same chips and slopes, each member's code pair replaced by its mate.
pub fn mate_set(set: &CodeSet) -> Result<CodeSet> {
    let members = set
        .members
        .iter()
        .map(|m| {
            let (c, d) = mate_pair(&m.a_code, &m.b_code)?;
            member(&set.params, m.slope, m.origin.flipped(), &c, &d)
        })
        .collect::<Result<_>>()?;
    Ok(CodeSet {
        params: set.params.clone(),
        members,
    })
}

/// Full cross-correlation of `s1` through the receiver matched to `s2`,
/// on the five-region template. For a pair code against its mate the
/// middle three regions vanish.
pub fn pair_mate_xcorr(s1: &AssembledCode, s2: &AssembledCode) -> Result<RegionReport> {
    if s1.code_len() != s2.code_len() || s1.chip_len() != s2.chip_len() {
        return arg("codes must share N_g and chip length");
    }
    let out = receiver(
        s1.samples(),
        s2.a_wave(),
        s2.b_wave(),
        s2.code_len(),
        s2.chip_len(),
    )?;
    region_report(&out.combined, s2.code_len(), s2.chip_len())
}

/// Pair set followed by mate set, provenance kept.
pub fn combined_set(pair: &CodeSet, mate: &CodeSet) -> Result<CodeSet> {
    if pair.params != mate.params {
        return arg("combined set needs matching shared parameters");
    }
    let mut members = pair.members.clone();
    members.extend(mate.members.iter().cloned());
    Ok(CodeSet {
        params: pair.params.clone(),
        members,
    })
}

/// `L` codes on every other slot of a `2L`-slot slope grid, alternating
/// pair and mate codes, so same-origin neighbours sit four slots apart.
pub fn best_candidate_set(params: &SetParams, count: usize) -> Result<CodeSet> {
    if count < 2 {
        return arg(format!("best-candidate set needs L >= 2, got {count}"));
    }
    let (a, b) = params.golay_pair()?;
    let (c, d) = mate_pair(&a, &b)?;
    let grid = slope_values(params.family, 2 * count, params.k)?;
    let members = (0..count)
        .map(|i| {
            let slope = grid[2 * i];
            if i % 2 == 0 {
                member(params, slope, PairOrigin::Pair, &a, &b)
            } else {
                member(params, slope, PairOrigin::Mate, &c, &d)
            }
        })
        .collect::<Result<_>>()?;
    Ok(CodeSet {
        params: params.clone(),
        members,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeSetMetrics {
    pub asp: Vec<f64>,
    pub mccp: f64,
    pub accp: f64,
    pub avg_acf_peak: f64,
}

impl CodeSetMetrics {
    pub fn asp_db(&self) -> Vec<f64> {
        self.asp.iter().map(|&v| magnitude_db(v)).collect()
    }
    pub fn mccp_db(&self) -> f64 {
        magnitude_db(self.mccp)
    }
    pub fn accp_db(&self) -> f64 {
        magnitude_db(self.accp)
    }
    pub fn avg_acf_peak_db(&self) -> f64 {
        magnitude_db(self.avg_acf_peak)
    }
}

/// Per-member autocorrelation sidelobe peak (the cross-region peak of the
/// member's own receiver output). Defined for any set size.
pub fn autocorrelation_peaks(set: &CodeSet) -> Result<Vec<f64>> {
    set.members
        .par_iter()
        .map(|m| {
            let out = m.code.self_output()?;
            Ok(region_report(&out, m.code.code_len(), m.code.chip_len())?.cross_region_peak)
        })
        .collect()
}

/// Peak normalized cross-correlation for every unordered member pair
/// `(l, k)`, `l < k`, in row-major order.
pub fn pairwise_cross_peaks(set: &CodeSet) -> Result<Vec<((usize, usize), f64)>> {
    let n = set.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|l| (l + 1..n).map(move |k| (l, k)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(l, k)| {
            let (x, y) = (&set.members[l].code, &set.members[k].code);
            let norm = 2.0 * x.block_len() as f64;
            Ok((
                (l, k),
                xcorr_full(x.samples(), y.samples())?.peak_magnitude() / norm,
            ))
        })
        .collect()
}

pub fn set_metrics(set: &CodeSet) -> Result<CodeSetMetrics> {
    if set.len() < 2 {
        return arg(format!(
            "MCCP and ACCP need at least two members, got {}",
            set.len()
        ));
    }
    let asp = autocorrelation_peaks(set)?;
    let cross = pairwise_cross_peaks(set)?;
    let mccp = cross.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let accp = cross.iter().map(|(_, v)| *v).sum::<f64>() / cross.len() as f64;
    let avg_acf_peak = asp.iter().sum::<f64>() / asp.len() as f64;
    Ok(CodeSetMetrics {
        asp,
        mccp,
        accp,
        avg_acf_peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chips::hop_sequence;

    fn params(family: ChipFamily, n_g: usize, n: usize) -> SetParams {
        SetParams::new(family, n_g, n, 0.24, 2 * n).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SetParams::new(ChipFamily::DfLfm, 12, 8, 0.24, 8).is_err());
        assert!(SetParams::new(ChipFamily::DfLfm, 8, 8, 0.6, 8).is_err());
        assert!(SetParams::new(ChipFamily::DfPlfmUpUp, 8, 7, 0.24, 8).is_err());
    }

    #[test]
    fn singleton_set_is_base_code() {
        let p = params(ChipFamily::DfLfm, 4, 8);
        let set = build_set(&p, 1).unwrap();
        let (a, b) = p.golay_pair().unwrap();
        let base = build_code_from_spec(&a, &b, &p.chip(0.24).unwrap()).unwrap();
        assert_eq!(set.members[0].code, base);
        assert!(set_metrics(&set).is_err());
        assert_eq!(autocorrelation_peaks(&set).unwrap().len(), 1);
        let mate = mate_set(&set).unwrap();
        assert_eq!(mate.len(), 1);
        assert_eq!(mate.members[0].origin, PairOrigin::Mate);
        let (c, d) = mate_pair(&a, &b).unwrap();
        assert_eq!(mate.members[0].a_code, c);
        assert_eq!(mate.members[0].b_code, d);
    }

    #[test]
    fn plfm_sets_share_bandwidth() {
        for fam in [ChipFamily::DfPlfmUpUp, ChipFamily::DfPlfmUpDown] {
            let p = params(fam, 4, 16);
            for g in slope_values(fam, 4, p.k).unwrap() {
                let h = hop_sequence(&p.chip(g).unwrap());
                assert_eq!(*h.iter().min().unwrap(), 0);
                assert_eq!(*h.iter().max().unwrap(), 15);
            }
        }
    }

    #[test]
    fn lfm_bandwidth_grows_with_slope() {
        let p = SetParams::new(ChipFamily::DfLfm, 4, 16, 0.1, 32).unwrap();
        let set = build_set(&p, 4).unwrap();
        let maxima: Vec<i64> = set
            .members
            .iter()
            .map(|m| {
                *hop_sequence(&p.chip(m.slope).unwrap())
                    .iter()
                    .max()
                    .unwrap()
            })
            .collect();
        assert!(maxima.windows(2).all(|w| w[0] < w[1]), "{maxima:?}");
    }

    #[test]
    fn identical_members_give_unit_mccp() {
        let p = params(ChipFamily::DfLfm, 4, 8);
        let one = build_set(&p, 1).unwrap();
        let twice = combined_set(&one, &one).unwrap();
        let m = set_metrics(&twice).unwrap();
        assert!((m.mccp - 1.0).abs() < 1e-12);
        assert!(m.accp <= m.mccp);
    }

    #[test]
    fn mate_members_keep_asp_and_zero_region() {
        let p = params(ChipFamily::DfLfm, 16, 8);
        let pair = build_set(&p, 3).unwrap();
        let mate = mate_set(&pair).unwrap();
        let asp_p = autocorrelation_peaks(&pair).unwrap();
        let asp_m = autocorrelation_peaks(&mate).unwrap();
        for (x, y) in asp_p.iter().zip(&asp_m) {
            assert!((x - y).abs() < 1e-12);
        }
        for m in &mate.members {
            let rep = region_report(&m.code.self_output().unwrap(), 16, p.chip_len()).unwrap();
            assert!(rep.zero_region_peak <= 1e-9);
        }
    }

    #[test]
    fn pair_mate_middle_region_vanishes() {
        let p = params(ChipFamily::DfLfm, 16, 8);
        let pair = build_set(&p, 1).unwrap();
        let mate = mate_set(&pair).unwrap();
        let rep = pair_mate_xcorr(&pair.members[0].code, &mate.members[0].code).unwrap();
        assert!(rep.middle_peak <= 1e-9);
        assert!(!rep.has_mainlobe(0.5));
        assert!(rep.cross_region_peak > 0.0);

        let own = pair_mate_xcorr(&pair.members[0].code, &pair.members[0].code).unwrap();
        assert!((own.mainlobe_peak - 1.0).abs() < 1e-12);
        assert!(own.has_mainlobe(0.5));
    }

    #[test]
    fn combined_set_layout() {
        let p = params(ChipFamily::DfPlfmUpUp, 4, 8);
        let pair = build_set(&p, 4).unwrap();
        let mate = mate_set(&pair).unwrap();
        let all = combined_set(&pair, &mate).unwrap();
        assert_eq!(all.len(), 8);
        assert_eq!(&all.members[..4], &pair.members[..]);
        let other = build_set(&params(ChipFamily::DfLfm, 4, 8), 4).unwrap();
        assert!(combined_set(&pair, &other).is_err());
    }

    #[test]
    fn best_candidate_layout() {
        let p = params(ChipFamily::DfLfm, 4, 8);
        assert!(best_candidate_set(&p, 1).is_err());
        let best = best_candidate_set(&p, 4).unwrap();
        let grid = slope_values(p.family, 8, p.k).unwrap();
        let origins: Vec<_> = best.members.iter().map(|m| m.origin).collect();
        assert_eq!(
            origins,
            vec![
                PairOrigin::Pair,
                PairOrigin::Mate,
                PairOrigin::Pair,
                PairOrigin::Mate
            ]
        );
        for (i, m) in best.members.iter().enumerate() {
            assert_eq!(m.slope, grid[2 * i]);
        }
        let two = best_candidate_set(&p, 2).unwrap();
        assert_eq!(two.members[0].origin, PairOrigin::Pair);
        assert_eq!(two.members[1].origin, PairOrigin::Mate);
    }
}
