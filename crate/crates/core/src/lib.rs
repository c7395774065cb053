//! Exposure-aware downlink beamforming simulator.
//!
//! A base station with an `M`-element uniform linear array serves one target
//! user through `N` far-field scatterers and `K` self-configuring
//! reconfigurable intelligent surfaces (RIS). Four precoders are compared:
//!
//! - **MRT**: matched filter at full power.
//! - **Reduced MRT**: matched filter with the transmit power lowered until
//!   the received power on a limit circle around the array stays below a
//!   threshold.
//! - **Truncated MRT**: the matched filter is projected on a DFT beam
//!   codebook and only the beams whose arc of the limit circle exceeds the
//!   threshold are scaled down.
//! - **Truncated & Boosted MRT**: additionally scales up the beams whose arc
//!   stays strictly below the threshold, under a total-power guard.
//!
//! Distances are in wavelengths and powers are normalized by the maximum
//! transmit power; decibels only appear at I/O boundaries.
//!
//! The modules follow the processing chain:
//!
//! | module | contents |
//! |---|---|
//! | [`scenario`] | configuration, seeded random geometry and gains |
//! | [`channel`] | scatter, RIS, total and near-field channel rows; received power |
//! | [`codebook`] | DFT codebook, beam peaks on the limit circle, arcs |
//! | [`exposure`] | limit-circle scans, arc maxima, area scans |
//! | [`schemes`] | the four precoders |
//! | [`experiments`] | single-snapshot and Monte-Carlo runs, empirical CDFs |
//! | [`io`] | JSON config, CSV tables, heatmaps, run manifests |
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiments;
pub mod exposure;
pub mod io;
pub mod scenario;
pub mod schemes;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Converts a linear power ratio to decibels.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Converts decibels to a linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
