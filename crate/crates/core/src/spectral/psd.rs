use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bessel::{gamma_half_integer, BesselOrder};
use super::hankel::{
    breakpoints, oscillation_cycles, profile_frequency, WeightedNodes, MIN_PANELS,
};
use crate::error::{Error, Result};
use crate::pcf::{read_two_columns, PcfParams, RadialProfile};
use crate::synthesis::PointSet;

/// Tail of the damped oscillation is dropped once its envelope falls below this.
pub const TAIL_TOLERANCE: f64 = 1e-6;
/// `P(k*) >= -REALIZABILITY_TOLERANCE` counts as non-negative.
pub const REALIZABILITY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SPECTRAL_POINTS: usize = 1000;

/// Uniformly spaced frequencies `k_min..=k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    k_min: f64,
    k_max: f64,
    points: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(k_min: f64, k_max: f64, m_k: usize) -> Result<Self> {
        if !(k_min > 0.0) || !(k_max > k_min) || !k_max.is_finite() {
            return Err(Error::invalid(format!(
                "spectral grid needs 0 < k_min < k_max, got [{k_min}, {k_max}]"
            )));
        }
        if m_k < 2 {
            return Err(Error::invalid("spectral grid needs at least two points"));
        }
        let step = (k_max - k_min) / (m_k - 1) as f64;
        let mut points: Vec<f64> = (0..m_k).map(|j| k_min + j as f64 * step).collect();
        points[m_k - 1] = k_max;
        Ok(Self {
            k_min,
            k_max,
            points,
        })
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn m_k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// The same frequencies expressed in cycles per unit length. The Hankel
    /// route works in radians per unit length; [`empirical_psd`] in cycles.
    pub fn to_cycles(&self) -> SpectralGrid {
        let s = 1.0 / (2.0 * PI);
        SpectralGrid {
            k_min: self.k_min * s,
            k_max: self.k_max * s,
            points: self.points.iter().map(|k| k * s).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumProfile {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl SpectrumProfile {
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m_k() {
            return Err(Error::invalid("spectrum length does not match its grid"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimum value and the grid frequency where it occurs (first on ties).
    pub fn min(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, self.grid.points[0]);
        for (&k, &p) in self.grid.points.iter().zip(&self.values) {
            if p < best.0 {
                best = (p, k);
            }
        }
        best
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,P")?;
        for (k, p) in self.grid.points.iter().zip(&self.values) {
            writeln!(out, "{k},{p}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (ks, ps) = read_two_columns(input, "k,P")?;
        if ks.len() < 2 {
            return Err(Error::invalid("spectrum CSV needs at least two rows"));
        }
        let grid = SpectralGrid::new(ks[0], ks[ks.len() - 1], ks.len())?;
        SpectrumProfile::new(grid, ps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizabilityReport {
    pub feasible: bool,
    pub min_power: f64,
    pub argmin_k: f64,
}

fn check_counts(n: usize, d: usize) -> Result<BesselOrder> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "need at least two samples, got {n}"
        )));
    }
    BesselOrder::for_dimension(d)
}

/// Everything needed to evaluate `P(k)` for one profile at arbitrary `k`.
pub(crate) struct PsdKernel {
    order: BesselOrder,
    prefactor: f64,
    half_d: f64,
    nodes: WeightedNodes,
}

impl PsdKernel {
    /// Nodes resolve frequencies up to `k_max`.
    pub fn from_profile(profile: &RadialProfile, n: usize, d: usize, k_max: f64) -> Result<Self> {
        let order = check_counts(n, d)?;
        let half_d = d as f64 / 2.0;
        let (upper, min_panels) = match profile.params() {
            Some(p) => (p.support_end(TAIL_TOLERANCE), MIN_PANELS),
            None => (profile.grid().r_cut(), 1),
        };
        let breaks = breakpoints(profile, upper);
        // r * r^{d/2-1} * (G - 1)
        let nodes = WeightedNodes::gauss_legendre(
            &breaks,
            oscillation_cycles(k_max, profile_frequency(profile)),
            min_panels,
            |r| r.powf(half_d) * (profile.value_at(r) - 1.0),
        );
        Ok(Self {
            order,
            prefactor: n as f64 * (2.0 * PI).powf(half_d),
            half_d,
            nodes,
        })
    }

    pub fn from_params(params: &PcfParams, n: usize, d: usize, k_max: f64) -> Result<Self> {
        params.validate()?;
        // the radial grid is irrelevant for a closed-form profile; give it
        // a single point so construction stays cheap
        let grid = crate::pcf::RadialGrid::new(params.r_1.max(params.r_min) * 2.0, 1)?;
        let profile = RadialProfile::from_params(*params, &grid)?;
        Self::from_profile(&profile, n, d, k_max)
    }

    pub fn power(&self, k: f64) -> f64 {
        1.0 + self.prefactor * k.powf(1.0 - self.half_d) * self.nodes.transform(self.order, k)
    }
}

/// `P(k) = 1 + n (2 pi)^{d/2} k^{1-d/2} H_{d/2-1}[r^{d/2-1} (G(r) - 1)](k)`
/// on a unit-volume domain, `k` in radians per unit length.
pub fn pcf_to_psd(
    profile: &RadialProfile,
    n: usize,
    d: usize,
    k_grid: &SpectralGrid,
) -> Result<SpectrumProfile> {
    let kernel = PsdKernel::from_profile(profile, n, d, k_grid.k_max())?;
    let values = k_grid.points().iter().map(|&k| kernel.power(k)).collect();
    SpectrumProfile::new(k_grid.clone(), values)
}

/// [`pcf_to_psd`] for a closed-form parameter set, skipping the radial grid.
pub fn psd_from_params(
    params: &PcfParams,
    n: usize,
    d: usize,
    k_grid: &SpectralGrid,
) -> Result<SpectrumProfile> {
    let kernel = PsdKernel::from_params(params, n, d, k_grid.k_max())?;
    let values = k_grid.points().iter().map(|&k| kernel.power(k)).collect();
    SpectrumProfile::new(k_grid.clone(), values)
}

pub fn check_realizability(
    profile: &RadialProfile,
    n: usize,
    d: usize,
    k_grid: &SpectralGrid,
) -> Result<RealizabilityReport> {
    if profile.values().iter().any(|v| *v < 0.0) {
        return Err(Error::invalid(
            "PCF must be non-negative before the spectral check",
        ));
    }
    Ok(report_from_spectrum(&pcf_to_psd(profile, n, d, k_grid)?))
}

/// Realizability verdict from an already computed spectrum.
pub fn report_from_spectrum(spectrum: &SpectrumProfile) -> RealizabilityReport {
    let (min_power, argmin_k) = spectrum.min();
    RealizabilityReport {
        feasible: min_power >= -REALIZABILITY_TOLERANCE,
        min_power,
        argmin_k,
    }
}

/// Unit vectors in `d` dimensions, uniformly distributed on the sphere.
pub fn random_directions(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| standard_normal(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; only the cosine branch is used so each draw costs two uniforms
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// `(1/N) |sum_j exp(-2 pi i k u.x_j)|^2` averaged over `directions`, with
/// `k` in cycles per unit length.
pub fn empirical_power(points: &PointSet, k: f64, directions: &[Vec<f64>]) -> Result<f64> {
    if points.n() == 0 {
        return Err(Error::invalid("empirical PSD of an empty point set"));
    }
    if directions.is_empty() {
        return Err(Error::invalid("need at least one direction"));
    }
    let mut proj = vec![0.0; points.n()];
    let mut total = 0.0;
    for u in directions {
        if u.len() != points.d() {
            return Err(Error::invalid(
                "direction dimension does not match the points",
            ));
        }
        project(points, u, &mut proj);
        total += power_along(&proj, k);
    }
    Ok(total / directions.len() as f64)
}

fn project(points: &PointSet, u: &[f64], out: &mut [f64]) {
    for (o, x) in out.iter_mut().zip(points.iter()) {
        *o = x.iter().zip(u).map(|(a, b)| a * b).sum();
    }
}

fn power_along(proj: &[f64], k: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &s in proj {
        let (sin, cos) = (-2.0 * PI * k * s).sin_cos();
        re += cos;
        im += sin;
    }
    (re * re + im * im) / proj.len() as f64
}

/// Direction-averaged periodogram of `points` over `k_grid` (cycles per unit
/// length), with `q_dirs` directions drawn from `seed`.
pub fn empirical_psd(
    points: &PointSet,
    k_grid: &SpectralGrid,
    q_dirs: usize,
    seed: u64,
) -> Result<SpectrumProfile> {
    if points.n() == 0 {
        return Err(Error::invalid("empirical PSD of an empty point set"));
    }
    if q_dirs == 0 {
        return Err(Error::invalid("need at least one direction"));
    }
    let dirs = random_directions(points.d(), q_dirs, seed);
    let mut values = vec![0.0; k_grid.m_k()];
    let mut proj = vec![0.0; points.n()];
    for u in &dirs {
        project(points, u, &mut proj);
        for (v, &k) in values.iter_mut().zip(k_grid.points()) {
            *v += power_along(&proj, k);
        }
    }
    for v in &mut values {
        *v /= q_dirs as f64;
    }
    SpectrumProfile::new(k_grid.clone(), values)
}

/// Expected excess of [`empirical_psd`] over the process spectrum caused by
/// observing `n` points through the unit cube: `(n - 1) |phi_W(k u)|^2`
/// averaged over the same directions, where
/// `|phi_W(k u)| = prod_p |sinc(pi k u_p)|`. `k` is in cycles per unit length.
pub fn window_leakage(
    n: usize,
    d: usize,
    k_grid: &SpectralGrid,
    q_dirs: usize,
    seed: u64,
) -> Result<SpectrumProfile> {
    if q_dirs == 0 {
        return Err(Error::invalid("need at least one direction"));
    }
    let dirs = random_directions(d, q_dirs, seed);
    let sinc2 = |x: f64| {
        if x.abs() < 1e-12 {
            1.0
        } else {
            (x.sin() / x).powi(2)
        }
    };
    let values = k_grid
        .points()
        .iter()
        .map(|&k| {
            let avg = dirs
                .iter()
                .map(|u| u.iter().map(|&c| sinc2(PI * k * c)).product::<f64>())
                .sum::<f64>()
                / q_dirs as f64;
            n.saturating_sub(1) as f64 * avg
        })
        .collect();
    SpectrumProfile::new(k_grid.clone(), values)
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half_integer(d as u32 + 2)
}
