//! Command-line surface. Every flag name doubles as a `--config` key.

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use golay_dfcw::channel::{ReferenceModel, SnrReference};
use golay_dfcw::chips::{
    base_chip, default_samples_per_subpulse, ChipFamily, ChipSpec, FadingProfile, MirrorSign,
    DEFAULT_K,
};
use golay_dfcw::sets::SetParams;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "golay-dfcw",
    version,
    about = "Golay-coded DFCW waveform toolkit"
)]
pub struct Cli {
    /// key=value file supplying flags for the subcommand; flags given on the
    /// command line take precedence. A `# provenance:` line is valid input.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Golay complementary pair of length 2^exponent.
    GenGolay(GenGolayArgs),
    /// Sampled chip and its mirror, with hop sequences.
    GenChip(GenChipArgs),
    /// Assembled code waveform `a⊗u ‖ 0 ‖ b⊗d`.
    GenCode(CodeArgs),
    /// Autocorrelation of a waveform CSV written by gen-code.
    Acf(AcfArgs),
    /// Noiseless receiver output with region annotations.
    Receiver(ReceiverArgs),
    /// Code set manifest (pair, mate, combined or best-candidate).
    GenSet(GenSetArgs),
    /// ASP, pairwise cross peaks, MCCP and ACCP of a code set.
    SetMetrics(GenSetArgs),
    /// Metrics of the pair, mate, combined and best-candidate sets side by side.
    BestSet(SetArgs),
    /// Cross-correlation of the pair code against its mate code.
    MateXcorr(ReceiverArgs),
    /// Chip autocorrelations with and without two-level fading.
    FadingDemo(FadingDemoArgs),
    /// Monte Carlo RMSE of the mainlobe position against SNR.
    RmseSim(RmseArgs),
    /// Delay-Doppler ambiguity surface.
    Ambiguity(AmbiguityArgs),
    /// Average ACF peak and ACCP next to the quoted literature values.
    Table1(Table1Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GenGolay(_) => "gen-golay",
            Self::GenChip(_) => "gen-chip",
            Self::GenCode(_) => "gen-code",
            Self::Acf(_) => "acf",
            Self::Receiver(_) => "receiver",
            Self::GenSet(_) => "gen-set",
            Self::SetMetrics(_) => "set-metrics",
            Self::BestSet(_) => "best-set",
            Self::MateXcorr(_) => "mate-xcorr",
            Self::FadingDemo(_) => "fading-demo",
            Self::RmseSim(_) => "rmse-sim",
            Self::Ambiguity(_) => "ambiguity",
            Self::Table1(_) => "table1",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Directory for output files.
    #[arg(long, env = "DFCW_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Output file name inside the output directory.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChipArgs {
    /// df-lfm, df-plfm-up-up or df-plfm-up-down.
    #[arg(long, default_value = "df-lfm")]
    pub family: ChipFamily,
    /// Number of sub-pulses N.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Samples per sub-pulse [default: 2N].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<usize>,
    /// Chip slope [default: the f[n] = n chip for df-lfm, 0.24 otherwise].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Mirror sign, 1 or -1.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub mirror_sign: i32,
}

impl ChipArgs {
    pub fn samples_per_subpulse(&self) -> usize {
        self.ns.unwrap_or(default_samples_per_subpulse(self.n))
    }

    pub fn spec(&self) -> Result<ChipSpec> {
        let ns = self.samples_per_subpulse();
        let spec = match self.k {
            Some(k) => ChipSpec::new(self.family, self.n, k, ns)?,
            None => base_chip(self.family, self.n, ns)?,
        };
        Ok(spec.with_mirror_sign(MirrorSign::from_i32(self.mirror_sign)?))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FadingArgs {
    /// Gain of sub-pulses below the boundary.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    /// Gain of sub-pulses from the boundary up.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    /// First sub-pulse of the upper band [default: N/2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<usize>,
}

impl FadingArgs {
    pub fn profile(&self, n: usize) -> Result<Option<FadingProfile>> {
        match (self.alpha1, self.alpha2) {
            (None, None) => {
                if self.boundary.is_some() {
                    bail!("--boundary needs --alpha1 and --alpha2");
                }
                Ok(None)
            }
            (Some(a1), Some(a2)) => Ok(Some(FadingProfile::new(
                a1,
                a2,
                self.boundary.unwrap_or((n / 2).max(1)),
            )?)),
            _ => bail!("fading needs both --alpha1 and --alpha2"),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenGolayArgs {
    /// Pair length is 2^exponent.
    #[arg(long)]
    pub exponent: u32,
    /// Write the mate pair instead.
    #[arg(long)]
    pub mate: bool,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct GenChipArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CodeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    /// Golay length N_g (power of two).
    #[arg(long, default_value_t = 8)]
    pub ng: usize,
    /// Use the mate of the Golay pair.
    #[arg(long)]
    pub mate: bool,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct AcfArgs {
    /// Waveform CSV with `re` and `im` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ReceiverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    /// Golay length N_g (power of two).
    #[arg(long, default_value_t = 8)]
    pub ng: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub fading: FadingArgs,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SetArgs {
    /// df-lfm, df-plfm-up-up or df-plfm-up-down.
    #[arg(long, default_value = "df-lfm")]
    pub family: ChipFamily,
    /// Golay length N_g (power of two).
    #[arg(long, default_value_t = 16)]
    pub ng: usize,
    /// Number of sub-pulses N.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// Samples per sub-pulse [default: 2N].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<usize>,
    /// Base slope k of the slope family.
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: f64,
    /// Number of codes L.
    #[arg(long, default_value_t = 4)]
    pub l: usize,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

impl SetArgs {
    pub fn params(&self) -> Result<SetParams> {
        let ns = self.ns.unwrap_or(default_samples_per_subpulse(self.n));
        Ok(SetParams::new(self.family, self.ng, self.n, self.k, ns)?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    Pair,
    Mate,
    Combined,
    Best,
}

#[derive(Args, Debug, Serialize)]
pub struct GenSetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
    /// Which set to build.
    #[arg(long, value_enum, default_value = "pair")]
    pub kind: SetKind,
}

#[derive(Args, Debug, Serialize)]
pub struct FadingDemoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    /// Golay length N_g used for the receiver check.
    #[arg(long, default_value_t = 16)]
    pub ng: usize,
    /// Gain of sub-pulses below the boundary.
    #[arg(long, default_value_t = 0.9792)]
    pub alpha1: f64,
    /// Gain of sub-pulses from the boundary up.
    #[arg(long, default_value_t = 0.8470)]
    pub alpha2: f64,
    /// First sub-pulse of the upper band.
    #[arg(long, default_value_t = 12)]
    pub boundary: usize,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Single-band code with DFCW chips.
    Proposed,
    /// Two-band Golay pair with sinusoid chips.
    Classical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceArg {
    ChannelMatched,
    Clean,
}

impl From<ReferenceArg> for ReferenceModel {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::ChannelMatched => Self::ChannelMatched,
            ReferenceArg::Clean => Self::Clean,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrReferenceArg {
    Received,
    Transmitted,
}

impl From<SnrReferenceArg> for SnrReference {
    fn from(r: SnrReferenceArg) -> Self {
        match r {
            SnrReferenceArg::Received => Self::Received,
            SnrReferenceArg::Transmitted => Self::Transmitted,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RmseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    /// Golay length N_g (power of two).
    #[arg(long, default_value_t = 16)]
    pub ng: usize,
    /// Code under test.
    #[arg(long, value_enum, default_value = "proposed")]
    pub baseline: Baseline,
    /// Chip length in samples for the classical baseline [default: N].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chip_len: Option<usize>,
    /// Monte Carlo trials per SNR point.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub snr_min: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub snr_max: f64,
    #[arg(long, default_value_t = 5.0)]
    pub snr_step: f64,
    /// Lower end of the uniform fading-gain range.
    #[arg(long, default_value_t = 0.6)]
    pub alpha_min: f64,
    /// Upper end of the uniform fading-gain range.
    #[arg(long, default_value_t = 1.0)]
    pub alpha_max: f64,
    /// First sub-pulse of the upper fading band [default: N/2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<usize>,
    /// Receiver references under fading.
    #[arg(long, value_enum, default_value = "channel-matched")]
    pub reference: ReferenceArg,
    /// Energy the SNR is defined against.
    #[arg(long, value_enum, default_value = "received")]
    pub snr_reference: SnrReferenceArg,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

impl RmseArgs {
    pub fn snr_grid(&self) -> Result<Vec<f64>> {
        if self.snr_step.is_nan()
            || self.snr_step <= 0.0
            || self.snr_max.is_nan()
            || self.snr_min.is_nan()
            || self.snr_max < self.snr_min
        {
            bail!("SNR grid needs snr-step > 0 and snr-max >= snr-min");
        }
        let count = ((self.snr_max - self.snr_min) / self.snr_step + 1e-9).floor() as usize + 1;
        if count > 10_000 {
            bail!("SNR grid of {count} points is too large");
        }
        Ok((0..count)
            .map(|i| self.snr_min + i as f64 * self.snr_step)
            .collect())
    }
}

#[derive(Args, Debug, Serialize)]
pub struct AmbiguityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chip: ChipArgs,
    /// Golay length N_g (power of two).
    #[arg(long, default_value_t = 8)]
    pub ng: usize,
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
    pub fd_min: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub fd_max: f64,
    #[arg(long, default_value_t = 41)]
    pub fd_count: usize,
    /// Keep every lag-step-th delay sample [default: chip length / 8].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag_step: Option<usize>,
    #[command(flatten)]
    #[serde(skip_serializing)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct Table1Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: SetArgs,
}
