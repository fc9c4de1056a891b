//! Kernel estimate of the pair correlation function on a bounded window.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cells::CellList;
use super::pointset::{squared_distance, PointSet};
use crate::error::{Error, Result};
use crate::pcf::{RadialGrid, RadialProfile};
use crate::spectral::bessel::gamma_half_integer;

/// Bandwidth as a fraction of the radial grid spacing.
pub const DEFAULT_SIGMA_FACTOR: f64 = 1.5;
/// Kernel support in bandwidths.
pub const KERNEL_CUTOFF: f64 = 4.0;
/// Lower clamp on the set covariance, as a fraction of the window volume.
pub const GAMMA_W_FLOOR: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub sigma: f64,
    pub v_w: f64,
    pub s_w: f64,
    /// Slope factor `c` in `gamma_W = V_W - c S_W r`.
    pub edge_coefficient: f64,
}

/// First-order slope of the isotropized set covariance of a convex body in
/// `d` dimensions per unit surface area: `Gamma(d/2) / (2 sqrt(pi) Gamma((d+1)/2))`,
/// which is `1/pi` in the plane.
pub fn edge_coefficient(d: usize) -> f64 {
    gamma_half_integer(d as u32) / (2.0 * PI.sqrt() * gamma_half_integer(d as u32 + 1))
}

impl EstimatorConfig {
    /// Window of volume `v_w` and surface `s_w` in `d` dimensions.
    pub fn new(sigma: f64, v_w: f64, s_w: f64, d: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "kernel bandwidth must be positive, got {sigma}"
            )));
        }
        if !(v_w > 0.0) || !(s_w >= 0.0) {
            return Err(Error::invalid(
                "window volume must be positive and surface non-negative",
            ));
        }
        if !(2..=8).contains(&d) {
            return Err(Error::invalid(format!("dimension {d} outside 2..=8")));
        }
        Ok(Self {
            sigma,
            v_w,
            s_w,
            edge_coefficient: edge_coefficient(d),
        })
    }

    /// Unit cube in `d` dimensions, bandwidth 1.5 grid spacings.
    pub fn for_grid(grid: &RadialGrid, d: usize) -> Self {
        Self {
            sigma: DEFAULT_SIGMA_FACTOR * grid.spacing(),
            v_w: 1.0,
            s_w: 2.0 * d as f64,
            edge_coefficient: edge_coefficient(d),
        }
    }

    fn linear_covariance(&self, r: f64) -> f64 {
        self.v_w - self.edge_coefficient * self.s_w * r
    }

    /// `V_W - c S_W r`, clamped below at `GAMMA_W_FLOOR V_W`.
    pub fn set_covariance(&self, r: f64) -> f64 {
        self.linear_covariance(r).max(GAMMA_W_FLOOR * self.v_w)
    }

    /// Whether the set covariance is clamped at `r`.
    pub fn is_clamped(&self, r: f64) -> bool {
        self.linear_covariance(r) < GAMMA_W_FLOOR * self.v_w
    }

    /// Normalized Gaussian, zero beyond `KERNEL_CUTOFF` bandwidths.
    #[inline]
    pub fn kernel(&self, z: f64) -> f64 {
        if z.abs() > KERNEL_CUTOFF * self.sigma {
            0.0
        } else {
            (-0.5 * z * z / (self.sigma * self.sigma)).exp() / ((2.0 * PI).sqrt() * self.sigma)
        }
    }
}

/// Surface area of the radius-`r` sphere in `d` dimensions.
pub fn sphere_area(d: usize, r: f64) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) * r.powi(d as i32 - 1) / gamma_half_integer(d as u32)
}

/// Estimated PCF plus the radius where the edge correction starts clamping.
#[derive(Clone, Debug, PartialEq)]
pub struct PcfEstimate {
    pub profile: RadialProfile,
    pub clamped_from: Option<f64>,
}

/// Per-grid-point factors and kernel windows shared by the estimator, its
/// gradient and the synthesis loop.
#[derive(Clone, Debug)]
pub(crate) struct EstimatorPlan {
    pub r: Vec<f64>,
    /// `G_j = scale_j * sum over unordered pairs k(r_j - dist)`.
    pub scale: Vec<f64>,
    pub cfg: EstimatorConfig,
    spacing: f64,
    reach: f64,
    r_cut: f64,
}

impl EstimatorPlan {
    pub fn new(grid: &RadialGrid, n: usize, d: usize, cfg: EstimatorConfig) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!(
                "PCF estimate needs at least two points, got {n}"
            )));
        }
        let r = grid.points().to_vec();
        let v = cfg.v_w;
        // ordered pairs count each unordered pair twice
        let scale = r
            .iter()
            .map(|&r| {
                2.0 * (v / cfg.set_covariance(r)) * (v / n as f64)
                    / (sphere_area(d, r) * (n - 1) as f64)
            })
            .collect();
        Ok(Self {
            r,
            scale,
            cfg,
            spacing: grid.spacing(),
            reach: KERNEL_CUTOFF * cfg.sigma,
            r_cut: grid.r_cut(),
        })
    }

    /// Pairs farther apart than this touch no grid point.
    pub fn cutoff(&self) -> f64 {
        self.r_cut + self.reach
    }

    /// Grid indices whose kernel window covers distance `s`.
    #[inline]
    pub fn window(&self, s: f64) -> std::ops::Range<usize> {
        // midpoint grid: r_j = (j + 1/2) h
        let lo = ((s - self.reach) / self.spacing - 0.5).ceil().max(0.0) as usize;
        let hi = (((s + self.reach) / self.spacing - 0.5).floor() + 1.0).max(0.0) as usize;
        lo.min(self.r.len())..hi.min(self.r.len())
    }

    /// Adds `sign * k(r_j - s)` to `h` for every grid point near `s`.
    #[inline]
    pub fn deposit(&self, h: &mut [f64], s: f64, sign: f64) {
        for j in self.window(s) {
            h[j] += sign * self.cfg.kernel(self.r[j] - s);
        }
    }

    /// Unordered-pair kernel sums for all points.
    pub fn pair_sums(&self, points: &PointSet, cells: &CellList) -> Vec<f64> {
        let mut h = vec![0.0; self.r.len()];
        let mut near = Vec::new();
        for i in 0..points.n() {
            let a = points.point(i);
            cells.candidates(a, &mut near);
            for &l in near.iter().filter(|&&l| l > i) {
                let s = squared_distance(a, points.point(l)).sqrt();
                if s < self.cutoff() {
                    self.deposit(&mut h, s, 1.0);
                }
            }
        }
        h
    }

    pub fn values(&self, h: &[f64]) -> Vec<f64> {
        h.iter()
            .zip(&self.scale)
            .map(|(h, c)| (h * c).max(0.0))
            .collect()
    }
}

pub fn estimate_pcf(
    points: &PointSet,
    grid: &RadialGrid,
    cfg: &EstimatorConfig,
) -> Result<PcfEstimate> {
    let plan = EstimatorPlan::new(grid, points.n(), points.d(), *cfg)?;
    let cells = CellList::new(points, plan.cutoff());
    let values = plan.values(&plan.pair_sums(points, &cells));
    let clamped_from = grid.points().iter().copied().find(|&r| cfg.is_clamped(r));
    Ok(PcfEstimate {
        profile: RadialProfile::from_values(grid.clone(), values)?,
        clamped_from,
    })
}

/// `sum_j w_j (G_j - target_j)^2`.
pub(crate) fn objective(values: &[f64], target: &[f64], weights: &[f64]) -> f64 {
    values
        .iter()
        .zip(target)
        .zip(weights)
        .map(|((g, t), w)| w * (g - t) * (g - t))
        .sum()
}

/// Gradient of `sum_j w_j (G_j - target_j)^2` with respect to point `i`,
/// given the current pair sums `h` and a superset `near` of the points within
/// `plan.cutoff()` of it. Coincident pairs contribute nothing.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gradient_with(
    plan: &EstimatorPlan,
    points: &PointSet,
    i: usize,
    near: &[usize],
    h: &[f64],
    target: &[f64],
    weights: &[f64],
    out: &mut [f64],
) {
    out.iter_mut().for_each(|g| *g = 0.0);
    // d(objective)/d(h_j) = 2 w_j (G_j - target_j) scale_j
    let sigma2 = plan.cfg.sigma * plan.cfg.sigma;
    let xi = points.point(i);
    for &l in near {
        if l == i {
            continue;
        }
        let xl = points.point(l);
        let s = squared_distance(xi, xl).sqrt();
        if s == 0.0 {
            continue;
        }
        let mut coef = 0.0;
        for j in plan.window(s) {
            let z = plan.r[j] - s;
            let k = plan.cfg.kernel(z);
            if k == 0.0 {
                continue;
            }
            let resid = h[j] * plan.scale[j] - target[j];
            // d k(r_j - s) / ds = (r_j - s) / sigma^2 k
            coef += 2.0 * weights[j] * resid * plan.scale[j] * z / sigma2 * k;
        }
        if coef != 0.0 {
            for ((g, a), b) in out.iter_mut().zip(xi).zip(xl) {
                *g += coef * (a - b) / s;
            }
        }
    }
}

/// Analytic gradient of the unweighted PCF-matching objective with respect
/// to the coordinates of point `i`.
pub fn pcf_gradient(
    points: &PointSet,
    i: usize,
    target: &RadialProfile,
    grid: &RadialGrid,
    cfg: &EstimatorConfig,
) -> Result<Vec<f64>> {
    if i >= points.n() {
        return Err(Error::invalid(format!(
            "point index {i} out of range for {} points",
            points.n()
        )));
    }
    let plan = EstimatorPlan::new(grid, points.n(), points.d(), *cfg)?;
    let t: Vec<f64> = grid.points().iter().map(|&r| target.value_at(r)).collect();
    let cells = CellList::new(points, plan.cutoff());
    let h = plan.pair_sums(points, &cells);
    let mut near = Vec::new();
    cells.candidates(points.point(i), &mut near);
    let mut g = vec![0.0; points.d()];
    gradient_with(&plan, points, i, &near, &h, &t, &vec![1.0; t.len()], &mut g);
    Ok(g)
}

/// Unweighted PCF-matching objective of `points` against `target`.
pub fn matching_objective(
    points: &PointSet,
    target: &RadialProfile,
    grid: &RadialGrid,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let est = estimate_pcf(points, grid, cfg)?;
    let t: Vec<f64> = grid.points().iter().map(|&r| target.value_at(r)).collect();
    Ok(objective(est.profile.values(), &t, &vec![1.0; t.len()]))
}
