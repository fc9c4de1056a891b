//! Coverage-based sample designs.
//!
//! The crate builds point designs whose pair correlation function (PCF) has a
//! hard-core region followed by a peak and an optional damped oscillation,
//! picks the largest coverage radius that keeps the design spectrally
//! realizable, synthesizes matching point sets by gradient descent and
//! compares them against standard exploratory designs.

pub mod baseline;
pub mod config;
pub mod design;
pub mod error;
pub mod eval;
pub mod pcf;
pub mod spectral;
pub mod synthesis;
pub mod workspace;

pub use design::{CoverageReport, DesignSpec, PackingTable};
pub use error::{Error, Result};
pub use pcf::{Family, Oscillation, PcfParams, RadialGrid, RadialProfile};
pub use spectral::{RealizabilityReport, SpectralGrid, SpectrumProfile};
pub use synthesis::PointSet;
