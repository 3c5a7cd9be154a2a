//! Zero-sidelobe-region radar codes from Golay complementary pairs and
//! discrete-frequency (DFCW) chips.
//!
//! A code is `a(t) ‖ gap ‖ b(t)`, where `a` spreads one Golay pair member with
//! a DF-LFM or DF-PLFM chip `u` and `b` spreads the other with the mirror
//! chip `d = conj(u(−t))`. Because `u` and `d` have identical
//! autocorrelations, the matched-filter output of the code is exactly zero
//! on a band around the mainlobe.
//!
//! Modules, bottom up:
//! - [`golay`]: pairs, mates, integer correlations
//! - [`chips`]: hop laws, chip synthesis, mirrors, slope families, fading
//! - [`correlate`]: direct and FFT correlation, dB helpers
//! - [`receiver`]: code assembly, receiver, region report, two-band sum
//! - [`sets`]: slope-varied code sets and their ASP/MCCP/ACCP metrics
//! - [`channel`]: noise, RMSE Monte Carlo, ambiguity surface

pub mod channel;
pub mod chips;
pub mod correlate;
pub mod error;
pub mod golay;
pub mod receiver;
pub mod sets;

pub use error::{Error, Result};
