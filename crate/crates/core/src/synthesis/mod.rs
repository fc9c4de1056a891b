//! Point-set synthesis: PCF estimation, PCF-matching gradient descent and
//! dart throwing.

mod cells;
mod dart;
pub mod estimator;
pub mod gd;
pub mod pointset;

pub use dart::dart_throwing;
pub use estimator::{
    estimate_pcf, matching_objective, pcf_gradient, sphere_area, EstimatorConfig, PcfEstimate,
    DEFAULT_SIGMA_FACTOR,
};
pub use gd::{
    coverage_weights, default_step_scale, default_weights, learning_rate, synthesize, Schedule,
    SynthesisConfig, SynthesisTrace, DEFAULT_CLR_RATE, DEFAULT_COVERAGE_WEIGHT,
    DEFAULT_REFRESH_EVERY, DEFAULT_T_MAX,
};
pub use pointset::{min_pairwise_distance, PointSet, PointSetMeta, Sidecar};
