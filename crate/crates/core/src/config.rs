//! Versioned run configuration collecting every tunable default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::design::{
    default_p0_grid, DesignSpec, SearchOptions, TailShape, DEFAULT_MAX_ITERS, DEFAULT_STEP_FACTOR,
};
use crate::error::{Error, Result};
use crate::eval::{
    BayesOptConfig, GpConfig, OracleConfig, OracleKind, DEFAULT_CANDIDATE_POOL,
    DEFAULT_DART_FAILURES, DEFAULT_DART_RADIUS_FACTOR,
};
use crate::pcf::{RadialGrid, DEFAULT_GRID_POINTS, DEFAULT_R_CUT_FACTOR};
use crate::synthesis::{
    default_step_scale, EstimatorConfig, Schedule, SynthesisConfig, DEFAULT_CLR_RATE,
    DEFAULT_COVERAGE_WEIGHT, DEFAULT_REFRESH_EVERY, DEFAULT_SIGMA_FACTOR, DEFAULT_T_MAX,
};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    pub design: DesignSection,
    pub synthesis: SynthesisSection,
    pub generate: GenerateSection,
    pub eval: EvalSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DesignSection {
    pub p0_grid: Vec<f64>,
    pub tail: TailShape,
    pub tail_sweep: bool,
    /// Ascent step in reference radii.
    pub step_factor: f64,
    pub max_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisSection {
    pub t_max: usize,
    pub schedule: Schedule,
    pub clr_rate: f64,
    /// `None` scales the step with the design's reference radius.
    pub step_scale: Option<f64>,
    /// Kernel bandwidth in radial grid spacings.
    pub sigma_factor: f64,
    pub coverage_weight: f64,
    pub refresh_every: usize,
    pub grid_points: usize,
    /// Radial grid extent in reference radii.
    pub r_cut_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateSection {
    /// Dart radius in reference radii, used when no absolute radius is given.
    pub dart_radius_factor: f64,
    pub dart_failures: usize,
    pub sobol_skip: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub trials: usize,
    pub oracle: OracleKind,
    pub k: usize,
    pub trees: usize,
    pub max_depth: usize,
    pub init: usize,
    pub budget: usize,
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise: f64,
    pub candidate_pool: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            design: DesignSection::default(),
            synthesis: SynthesisSection::default(),
            generate: GenerateSection::default(),
            eval: EvalSection::default(),
        }
    }
}

impl Default for DesignSection {
    fn default() -> Self {
        Self {
            p0_grid: default_p0_grid(),
            tail: TailShape::DEFAULT,
            tail_sweep: false,
            step_factor: DEFAULT_STEP_FACTOR,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

impl Default for SynthesisSection {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            schedule: Schedule::Alr,
            clr_rate: DEFAULT_CLR_RATE,
            step_scale: None,
            sigma_factor: DEFAULT_SIGMA_FACTOR,
            coverage_weight: DEFAULT_COVERAGE_WEIGHT,
            refresh_every: DEFAULT_REFRESH_EVERY,
            grid_points: DEFAULT_GRID_POINTS,
            r_cut_factor: DEFAULT_R_CUT_FACTOR,
        }
    }
}

impl Default for GenerateSection {
    fn default() -> Self {
        Self {
            dart_radius_factor: DEFAULT_DART_RADIUS_FACTOR,
            dart_failures: DEFAULT_DART_FAILURES,
            sobol_skip: 1,
        }
    }
}

impl Default for EvalSection {
    fn default() -> Self {
        let oracle = OracleConfig::default();
        let gp = GpConfig::default();
        Self {
            trials: 20,
            oracle: oracle.kind,
            k: oracle.k,
            trees: oracle.trees,
            max_depth: oracle.max_depth,
            init: 50,
            budget: 150,
            length_scale: gp.length_scale,
            signal_variance: gp.signal_variance,
            noise: gp.noise,
            candidate_pool: DEFAULT_CANDIDATE_POOL,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::invalid(format!("bad run config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::invalid(format!(
                "run config version {} is not supported (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are always representable")
    }

    pub fn search_options(&self) -> SearchOptions {
        let d = &self.design;
        SearchOptions {
            p0_grid: d.p0_grid.clone(),
            tail: d.tail,
            tail_sweep: d.tail_sweep,
            step: d.step_factor,
            max_iters: d.max_iters,
        }
    }

    pub fn radial_grid(&self, spec: &DesignSpec) -> Result<RadialGrid> {
        let s = &self.synthesis;
        if !(s.r_cut_factor > 0.0) {
            return Err(Error::invalid(format!(
                "r_cut_factor must be positive, got {}",
                s.r_cut_factor
            )));
        }
        RadialGrid::new(
            s.r_cut_factor * crate::design::reference_radius(spec),
            s.grid_points,
        )
    }

    /// Synthesis settings for `spec`.
    pub fn synthesis_config(&self, spec: &DesignSpec, seed: u64) -> Result<SynthesisConfig> {
        let s = &self.synthesis;
        let grid = self.radial_grid(spec)?;
        let estimator = EstimatorConfig::new(
            s.sigma_factor * grid.spacing(),
            1.0,
            2.0 * spec.d() as f64,
            spec.d(),
        )?;
        Ok(SynthesisConfig {
            t_max: s.t_max,
            schedule: s.schedule,
            clr_rate: s.clr_rate,
            step_scale: s.step_scale.unwrap_or_else(|| default_step_scale(spec)),
            seed,
            estimator,
            grid,
            coverage_weight: s.coverage_weight,
            weights: None,
            refresh_every: s.refresh_every,
        })
    }

    pub fn oracle(&self, seed: u64) -> OracleConfig {
        let e = &self.eval;
        OracleConfig {
            kind: e.oracle,
            k: e.k,
            trees: e.trees,
            max_depth: e.max_depth,
            seed,
        }
    }

    pub fn bayes_opt(&self, seed: u64) -> BayesOptConfig {
        let e = &self.eval;
        BayesOptConfig {
            gp: GpConfig {
                length_scale: e.length_scale,
                signal_variance: e.signal_variance,
                noise: e.noise,
            },
            candidate_pool: e.candidate_pool,
            seed,
        }
    }
}
