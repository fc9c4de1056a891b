//! Radial grids and the three pair correlation function families.
//!
//! All profiles live on a midpoint grid `r_j = (j - 0.5) * r_cut / m`. The
//! step families use two different boundary conventions: the disk-sampling
//! step is closed at `r_min` (`G(r_min) = 1`), while the stair and the damped
//! oscillation families use a unit step that is open on the left, so
//! `G(r_min) = 0` and `G(r_1) = p0`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of radial samples used for target profiles.
pub const DEFAULT_GRID_POINTS: usize = 200;
/// Target grids extend to this multiple of the reference radius.
pub const DEFAULT_R_CUT_FACTOR: f64 = 3.0;

/// Midpoint discretization of `(0, r_cut)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    r_cut: f64,
    points: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_cut: f64, m: usize) -> Result<Self> {
        if !(r_cut > 0.0) || !r_cut.is_finite() {
            return Err(Error::invalid(format!(
                "r_cut must be positive, got {r_cut}"
            )));
        }
        if m == 0 {
            return Err(Error::invalid("radial grid needs at least one point"));
        }
        let h = r_cut / m as f64;
        let points = (0..m).map(|j| (j as f64 + 0.5) * h).collect();
        Ok(Self { r_cut, points })
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Distance between neighbouring abscissae.
    pub fn spacing(&self) -> f64 {
        self.r_cut / self.points.len() as f64
    }
}

pub fn make_radial_grid(r_cut: f64, m: usize) -> Result<RadialGrid> {
    RadialGrid::new(r_cut, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pds,
    Sfsd,
    Proposed,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Pds, Family::Sfsd, Family::Proposed];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Pds => "pds",
            Family::Sfsd => "sfsd",
            Family::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pds" => Ok(Family::Pds),
            "sfsd" => Ok(Family::Sfsd),
            "proposed" => Ok(Family::Proposed),
            other => Err(Error::invalid(format!("unknown family `{other}`"))),
        }
    }
}

/// Damped oscillation tail `1 + (a/r) exp(-b r) sin(2 pi c r + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phase: f64,
}

impl Oscillation {
    pub const ZERO: Oscillation = Oscillation {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        phase: 0.0,
    };

    /// `(a/r) exp(-b r)`, the bound on `|G(r) - 1|` in the tail.
    pub fn envelope(&self, r: f64) -> f64 {
        self.a / r * (-self.b * r).exp()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.envelope(r) * (2.0 * std::f64::consts::PI * self.c * r + self.phase).sin()
    }
}

/// Parameters of one member of the design family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcfParams {
    pub family: Family,
    pub r_min: f64,
    pub r_1: f64,
    pub p0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d_phase: f64,
}

impl PcfParams {
    pub fn pds(r_min: f64) -> Self {
        Self {
            family: Family::Pds,
            r_min,
            r_1: r_min,
            p0: 1.0,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d_phase: 0.0,
        }
    }

    pub fn sfsd(r_min: f64, r_1: f64, p0: f64) -> Self {
        Self {
            family: Family::Sfsd,
            r_1,
            p0,
            ..Self::pds(r_min)
        }
    }

    pub fn proposed(r_min: f64, r_1: f64, p0: f64, osc: Oscillation) -> Self {
        Self {
            family: Family::Proposed,
            r_min,
            r_1,
            p0,
            a: osc.a,
            b: osc.b,
            c: osc.c,
            d_phase: osc.phase,
        }
    }

    pub fn oscillation(&self) -> Oscillation {
        match self.family {
            Family::Proposed => Oscillation {
                a: self.a,
                b: self.b,
                c: self.c,
                phase: self.d_phase,
            },
            _ => Oscillation::ZERO,
        }
    }

    /// Peak width `r_1 - r_min`.
    pub fn peak_width(&self) -> f64 {
        self.r_1 - self.r_min
    }

    /// Same shape with `r_min` and `r_1` replaced.
    pub fn with_radii(&self, r_min: f64, r_1: f64) -> Self {
        Self {
            r_min,
            r_1,
            ..*self
        }
    }

    /// Checks the parameter invariants that apply to this family.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.r_min,
            self.r_1,
            self.p0,
            self.a,
            self.b,
            self.c,
            self.d_phase,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("PCF parameters must be finite"));
        }
        if !(self.r_min > 0.0) {
            return Err(Error::invalid(format!(
                "r_min must be positive, got {}",
                self.r_min
            )));
        }
        if self.family == Family::Pds {
            return Ok(());
        }
        if self.r_1 < self.r_min {
            return Err(Error::invalid(format!(
                "r_1 ({}) must not be below r_min ({})",
                self.r_1, self.r_min
            )));
        }
        if self.p0 < 1.0 {
            return Err(Error::invalid(format!(
                "p0 must be at least 1, got {}",
                self.p0
            )));
        }
        if self.family == Family::Proposed && (self.a < 0.0 || self.b < 0.0) {
            return Err(Error::invalid(
                "oscillation amplitude and decay must be non-negative",
            ));
        }
        Ok(())
    }

    /// Closed-form `G(r)`.
    pub fn value_at(&self, r: f64) -> f64 {
        match self.family {
            Family::Pds => {
                if r < self.r_min {
                    0.0
                } else {
                    1.0
                }
            }
            Family::Sfsd | Family::Proposed => {
                if r <= self.r_min {
                    0.0
                } else if r <= self.r_1 {
                    self.p0
                } else {
                    1.0 + self.oscillation().value(r)
                }
            }
        }
    }

    /// Radius beyond which `G(r) - 1` is below `tol` in magnitude.
    pub fn support_end(&self, tol: f64) -> f64 {
        let osc = self.oscillation();
        if osc.a == 0.0 || self.family != Family::Proposed {
            return self.r_1.max(self.r_min);
        }
        let mut r = self.r_1.max(self.r_min);
        if osc.envelope(r) <= tol {
            return r;
        }
        // envelope is monotone decreasing; bracket then bisect
        let mut hi = 2.0 * r;
        while osc.envelope(hi) > tol {
            hi *= 2.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (r + hi);
            if osc.envelope(mid) > tol {
                r = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Discretized `G(r)`. Profiles built from parameters remember them so that
/// consumers can fall back to the closed form off the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    params: Option<PcfParams>,
}

impl RadialProfile {
    /// Wraps sampled values; every value must be non-negative.
    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m() {
            return Err(Error::invalid(format!(
                "profile has {} values for a grid of {} points",
                values.len(),
                grid.m()
            )));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::invalid(format!("G(r_{j}) = {v} is negative")));
        }
        Ok(Self {
            grid,
            values,
            params: None,
        })
    }

    /// Samples `params` on `grid`, rejecting shapes that dip below zero.
    pub fn from_params(params: PcfParams, grid: &RadialGrid) -> Result<Self> {
        params.validate()?;
        let values: Vec<f64> = grid.points().iter().map(|&r| params.value_at(r)).collect();
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::invalid(format!(
                "{} PCF is negative at r = {} (G = {v})",
                params.family,
                grid.points()[j]
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            params: Some(params),
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> Option<&PcfParams> {
        self.params.as_ref()
    }

    /// `G(r)` from the closed form if known, else piecewise-linear through
    /// the samples with constant extension past either end.
    pub fn value_at(&self, r: f64) -> f64 {
        if let Some(p) = &self.params {
            return p.value_at(r);
        }
        let pts = self.grid.points();
        if r <= pts[0] {
            return self.values[0];
        }
        let last = pts.len() - 1;
        if r >= pts[last] {
            return self.values[last];
        }
        let h = self.grid.spacing();
        let pos = (r - pts[0]) / h;
        let j = (pos.floor() as usize).min(last - 1);
        let t = (r - pts[j]) / h;
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    /// Linear combination `alpha * self + beta * other` on a shared grid.
    pub fn combine(&self, alpha: f64, other: &RadialProfile, beta: f64) -> Result<RadialProfile> {
        if self.grid != other.grid {
            return Err(Error::invalid("profiles live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(RadialProfile {
            grid: self.grid.clone(),
            values,
            params: None,
        })
    }

    /// Writes `r,G` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,G")?;
        for (r, g) in self.grid.points().iter().zip(&self.values) {
            writeln!(out, "{r},{g}")?;
        }
        Ok(())
    }

    /// Reads `r,G` CSV written by [`RadialProfile::write_csv`]. The grid is
    /// reconstructed from the row count and the first abscissa.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (rs, gs) = read_two_columns(input, "r,G")?;
        if rs.is_empty() {
            return Err(Error::invalid("profile CSV has no rows"));
        }
        let r_cut = 2.0 * rs[0] * rs.len() as f64;
        let grid = RadialGrid::new(r_cut, rs.len())?;
        for (a, b) in grid.points().iter().zip(&rs) {
            if (a - b).abs() > 1e-9 * r_cut {
                return Err(Error::invalid("profile abscissae are not a midpoint grid"));
            }
        }
        RadialProfile::from_values(grid, gs)
    }
}

pub(crate) fn read_two_columns<R: BufRead>(input: R, header: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = input.lines();
    let first = lines.next().transpose()?;
    if first.as_deref().map(str::trim) != Some(header) {
        return Err(Error::invalid(format!("expected CSV header `{header}`")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |c: Option<&str>| -> Result<f64> {
            c.and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("malformed CSV row `{line}`")))
        };
        xs.push(parse(cols.next())?);
        ys.push(parse(cols.next())?);
    }
    Ok((xs, ys))
}

pub fn pcf_pds(r_min: f64, grid: &RadialGrid) -> Result<RadialProfile> {
    RadialProfile::from_params(PcfParams::pds(r_min), grid)
}

pub fn pcf_sfsd(params: &PcfParams, grid: &RadialGrid) -> Result<RadialProfile> {
    if params.family != Family::Sfsd {
        return Err(Error::invalid(format!(
            "expected sfsd parameters, got {}",
            params.family
        )));
    }
    RadialProfile::from_params(*params, grid)
}

pub fn pcf_proposed(params: &PcfParams, grid: &RadialGrid) -> Result<RadialProfile> {
    if params.family != Family::Proposed {
        return Err(Error::invalid(format!(
            "expected proposed parameters, got {}",
            params.family
        )));
    }
    RadialProfile::from_params(*params, grid)
}

/// Dispatches on `params.family`.
pub fn target_profile(params: &PcfParams, grid: &RadialGrid) -> Result<RadialProfile> {
    RadialProfile::from_params(*params, grid)
}
