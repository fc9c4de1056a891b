//! PCF-matching gradient descent with adaptive or constant learning rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cells::CellList;
use super::estimator::{gradient_with, objective, EstimatorConfig, EstimatorPlan};
use super::pointset::{squared_distance, PointSet};
use crate::design::{reference_radius, DesignSpec};
use crate::error::{Error, Result};
use crate::pcf::{RadialGrid, RadialProfile};

pub const DEFAULT_T_MAX: usize = 1000;
pub const DEFAULT_CLR_RATE: f64 = 0.01;
/// Iterations between full recomputations of the pair sums.
pub const DEFAULT_REFRESH_EVERY: usize = 50;
/// Default objective weight on grid points where the target is zero.
pub const DEFAULT_COVERAGE_WEIGHT: f64 = 100.0;
/// Design size at which step lengths are taken literally from the schedule.
pub const STEP_REFERENCE_DESIGN: (usize, usize) = (200, 4);

/// `reference_radius(spec) / reference_radius(200, 4)`: step lengths scale
/// with the mean point spacing.
pub fn default_step_scale(spec: &DesignSpec) -> f64 {
    let (n, d) = STEP_REFERENCE_DESIGN;
    let reference = DesignSpec::new(n, d).expect("reference design is valid");
    reference_radius(spec) / reference_radius(&reference)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// `0.1 exp(-0.1 sqrt(t))`
    Alr,
    /// Constant rate.
    Clr,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alr" => Ok(Schedule::Alr),
            "clr" => Ok(Schedule::Clr),
            other => Err(Error::invalid(format!(
                "unknown schedule '{other}'; expected alr or clr"
            ))),
        }
    }
}

impl Schedule {
    pub fn as_str(self) -> &'static str {
        match self {
            Schedule::Alr => "alr",
            Schedule::Clr => "clr",
        }
    }
}

/// Step length at iteration `t >= 1`.
pub fn learning_rate(schedule: Schedule, clr_rate: f64, t: usize) -> f64 {
    match schedule {
        Schedule::Alr => 0.1 * (-0.1 * (t as f64).sqrt()).exp(),
        Schedule::Clr => clr_rate,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisConfig {
    pub t_max: usize,
    pub schedule: Schedule,
    pub clr_rate: f64,
    /// Multiplies the scheduled step length.
    pub step_scale: f64,
    pub seed: u64,
    pub grid: RadialGrid,
    pub estimator: EstimatorConfig,
    /// Weight on grid points where the target vanishes.
    pub coverage_weight: f64,
    /// Explicit per-grid-point weights, overriding `coverage_weight`.
    pub weights: Option<Vec<f64>>,
    pub refresh_every: usize,
}

impl SynthesisConfig {
    pub fn new(spec: &DesignSpec, grid: RadialGrid, schedule: Schedule, seed: u64) -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            schedule,
            clr_rate: DEFAULT_CLR_RATE,
            step_scale: default_step_scale(spec),
            seed,
            estimator: EstimatorConfig::for_grid(&grid, spec.d()),
            grid,
            coverage_weight: DEFAULT_COVERAGE_WEIGHT,
            weights: None,
            refresh_every: DEFAULT_REFRESH_EVERY,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::invalid("t_max must be at least 1"));
        }
        if self.schedule == Schedule::Clr && !(self.clr_rate > 0.0) {
            return Err(Error::invalid(format!(
                "constant learning rate must be positive, got {}",
                self.clr_rate
            )));
        }
        if !(self.step_scale > 0.0) || !self.step_scale.is_finite() {
            return Err(Error::invalid(format!(
                "step scale must be positive, got {}",
                self.step_scale
            )));
        }
        if self.refresh_every == 0 {
            return Err(Error::invalid("refresh interval must be at least 1"));
        }
        if !(self.coverage_weight >= 0.0) || !self.coverage_weight.is_finite() {
            return Err(Error::invalid(format!(
                "coverage weight must be non-negative, got {}",
                self.coverage_weight
            )));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.grid.m() || w.iter().any(|w| !(*w >= 0.0)) {
                return Err(Error::invalid(
                    "weights must be non-negative, one per grid point",
                ));
            }
        }
        Ok(())
    }
}

/// `DEFAULT_COVERAGE_WEIGHT` where the target vanishes, one elsewhere.
pub fn default_weights(target_values: &[f64]) -> Vec<f64> {
    coverage_weights(target_values, DEFAULT_COVERAGE_WEIGHT)
}

/// `weight` where the target vanishes, one elsewhere.
pub fn coverage_weights(target_values: &[f64], weight: f64) -> Vec<f64> {
    target_values
        .iter()
        .map(|&t| if t == 0.0 { weight } else { 1.0 })
        .collect()
}

/// Weighted objective at the initial points and after every iteration, plus
/// the part of it on grid points where the target is zero (the coverage region).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SynthesisTrace {
    pub initial_objective: f64,
    pub initial_coverage_residual: f64,
    pub objective: Vec<f64>,
    pub coverage_residual: Vec<f64>,
}

impl SynthesisTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objective.last().expect("trace has t_max >= 1 entries")
    }
}

/// Moves seeded uniform points so their estimated PCF matches `target` on
/// `cfg.grid`. Each iteration visits every point once in index order and
/// takes a normalized step of the scheduled length, clamped to the cube.
pub fn synthesize(
    target: &RadialProfile,
    spec: &DesignSpec,
    cfg: &SynthesisConfig,
) -> Result<(PointSet, SynthesisTrace)> {
    cfg.validate()?;
    let (n, d) = (spec.n(), spec.d());
    let plan = EstimatorPlan::new(&cfg.grid, n, d, cfg.estimator)?;
    let t_vals: Vec<f64> = cfg
        .grid
        .points()
        .iter()
        .map(|&r| target.value_at(r))
        .collect();
    let weights = cfg
        .weights
        .clone()
        .unwrap_or_else(|| coverage_weights(&t_vals, cfg.coverage_weight));
    let coverage_weights: Vec<f64> = t_vals
        .iter()
        .zip(&weights)
        .map(|(t, w)| if *t == 0.0 { *w } else { 0.0 })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = PointSet::new(d, (0..n * d).map(|_| rng.gen::<f64>()).collect())?;
    let mut cells = CellList::new(&points, plan.cutoff());
    let mut h = plan.pair_sums(&points, &cells);
    let (mut near, mut near_moved) = (Vec::new(), Vec::new());
    let mut grad = vec![0.0; d];
    let mut moved = vec![0.0; d];
    let values = plan.values(&h);
    let mut trace = SynthesisTrace {
        initial_objective: objective(&values, &t_vals, &weights),
        initial_coverage_residual: objective(&values, &t_vals, &coverage_weights),
        ..SynthesisTrace::default()
    };

    for t in 1..=cfg.t_max {
        let lambda = cfg.step_scale * learning_rate(cfg.schedule, cfg.clr_rate, t);
        for i in 0..n {
            cells.candidates(points.point(i), &mut near);
            gradient_with(&plan, &points, i, &near, &h, &t_vals, &weights, &mut grad);
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                continue;
            }
            for ((m, x), g) in moved.iter_mut().zip(points.point(i)).zip(&grad) {
                *m = (x - lambda * g / norm).clamp(0.0, 1.0);
            }
            cells.candidates(&moved, &mut near_moved);
            for &l in near.iter().filter(|&&l| l != i) {
                plan.deposit(
                    &mut h,
                    squared_distance(points.point(i), points.point(l)).sqrt(),
                    -1.0,
                );
            }
            for &l in near_moved.iter().filter(|&&l| l != i) {
                plan.deposit(
                    &mut h,
                    squared_distance(&moved, points.point(l)).sqrt(),
                    1.0,
                );
            }
            points.coords_mut()[i * d..(i + 1) * d].copy_from_slice(&moved);
            cells.relocate(i, &moved);
        }
        if t % cfg.refresh_every == 0 || t == cfg.t_max {
            h = plan.pair_sums(&points, &cells);
        }
        let values = plan.values(&h);
        trace.objective.push(objective(&values, &t_vals, &weights));
        trace
            .coverage_residual
            .push(objective(&values, &t_vals, &coverage_weights));
    }
    let tag = format!("gd-{}", cfg.schedule.as_str());
    Ok((
        points.with_meta(&tag, Some(cfg.seed), target.params().copied()),
        trace,
    ))
}
