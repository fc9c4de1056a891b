//! Bessel functions, Hankel transforms and power spectra.

pub mod bessel;
pub mod hankel;
pub mod psd;

pub use bessel::{bessel_j, BesselOrder};
pub use hankel::hankel_transform;
pub use psd::{
    check_realizability, empirical_power, empirical_psd, pcf_to_psd, psd_from_params,
    random_directions, report_from_spectrum, unit_ball_volume, window_leakage, RealizabilityReport,
    SpectralGrid, SpectrumProfile, REALIZABILITY_TOLERANCE,
};
