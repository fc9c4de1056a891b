//! Coverage metrics and the search for maximal-coverage parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcf::{
    Family, Oscillation, PcfParams, RadialGrid, DEFAULT_GRID_POINTS, DEFAULT_R_CUT_FACTOR,
};
use crate::spectral::bessel::gamma_half_integer;
use crate::spectral::psd::{report_from_spectrum as report, PsdKernel, DEFAULT_SPECTRAL_POINTS};
use crate::spectral::{
    psd_from_params, RealizabilityReport, SpectralGrid, REALIZABILITY_TOLERANCE,
};

/// Sample count and dimension of a design on the unit-volume cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignSpec {
    n: usize,
    d: usize,
}

impl DesignSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!(
                "a design needs at least two samples, got {n}"
            )));
        }
        if !(2..=8).contains(&d) {
            return Err(Error::invalid(format!("dimension {d} outside 2..=8")));
        }
        Ok(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Domain volume; fixed at one.
    pub fn volume(&self) -> f64 {
        1.0
    }
}

/// Densest known packing fraction per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingTable {
    gamma: Vec<(usize, f64)>,
}

impl PackingTable {
    /// Hexagonal, FCC, D4, D5, E6, E7 and E8 lattice packings.
    pub fn standard() -> Self {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        Self {
            gamma: vec![
                (2, PI / (2.0 * s3)),
                (3, PI / (3.0 * s2)),
                (4, PI * PI / 16.0),
                (5, PI * PI * s2 / 30.0),
                (6, PI.powi(3) * s3 / 144.0),
                (7, PI.powi(3) / 105.0),
                (8, PI.powi(4) / 384.0),
            ],
        }
    }

    pub fn from_entries(entries: Vec<(usize, f64)>) -> Result<Self> {
        if let Some((d, g)) = entries.iter().find(|(_, g)| !(*g > 0.0 && *g <= 1.0)) {
            return Err(Error::invalid(format!(
                "packing density {g} for d = {d} outside (0, 1]"
            )));
        }
        Ok(Self { gamma: entries })
    }

    pub fn gamma(&self, d: usize) -> Result<f64> {
        self.gamma
            .iter()
            .find(|(k, _)| *k == d)
            .map(|(_, g)| *g)
            .ok_or_else(|| Error::invalid(format!("no packing density for d = {d}")))
    }
}

impl Default for PackingTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// `(V Gamma(d/2 + 1) / (pi^{d/2} N))^{1/d}`: the radius at which `N` balls
/// fill the domain volume exactly.
pub fn reference_radius(spec: &DesignSpec) -> f64 {
    let d = spec.d as f64;
    (spec.volume() * gamma_half_integer(spec.d as u32 + 2) / (PI.powf(d / 2.0) * spec.n as f64))
        .powf(1.0 / d)
}

pub fn max_radius(spec: &DesignSpec, table: &PackingTable) -> Result<f64> {
    let gamma = table.gamma(spec.d)?;
    Ok(gamma.powf(1.0 / spec.d as f64) * reference_radius(spec))
}

/// `r_min / r_max`.
pub fn relative_radius(r_min: f64, spec: &DesignSpec, table: &PackingTable) -> Result<f64> {
    if !(r_min >= 0.0) {
        return Err(Error::invalid(format!(
            "r_min must be non-negative, got {r_min}"
        )));
    }
    Ok(r_min / max_radius(spec, table)?)
}

/// `r in (0, 3 r_ref)` with 200 samples.
pub fn default_radial_grid(spec: &DesignSpec) -> RadialGrid {
    RadialGrid::new(
        DEFAULT_R_CUT_FACTOR * reference_radius(spec),
        DEFAULT_GRID_POINTS,
    )
    .expect("reference radius is positive")
}

/// `k in [1, 10 / r_ref]` with 1000 samples.
pub fn default_spectral_grid(spec: &DesignSpec) -> SpectralGrid {
    SpectralGrid::new(1.0, 10.0 / reference_radius(spec), DEFAULT_SPECTRAL_POINTS)
        .expect("reference radius is below ten")
}

/// Oscillation tail in units of `r_min`: `a = amplitude r_min`,
/// `b = decay / r_min`, `c = frequency / r_min`. Tying the tail to `r_min`
/// keeps `G(r) = g(r / r_min)` for a fixed shape `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailShape {
    pub amplitude: f64,
    pub decay: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl TailShape {
    pub const DEFAULT: TailShape = TailShape {
        amplitude: 0.2,
        decay: 2.0,
        frequency: 0.5,
        phase: PI / 4.0,
    };

    pub fn at_radius(&self, r_min: f64) -> Oscillation {
        let r = r_min;
        Oscillation {
            a: self.amplitude * r,
            b: self.decay / r,
            c: self.frequency / r,
            phase: self.phase,
        }
    }

    /// Coarse grid used by the exhaustive tail sweep.
    pub fn sweep_grid() -> Vec<TailShape> {
        let mut out = Vec::new();
        for amplitude in [0.1, 0.2, 0.4] {
            for decay in [0.5, 1.0, 2.0, 4.0] {
                for frequency in [0.3, 0.5, 0.8] {
                    for phase in [-PI / 2.0, 0.0, PI / 4.0, PI / 2.0] {
                        out.push(TailShape {
                            amplitude,
                            decay,
                            frequency,
                            phase,
                        });
                    }
                }
            }
        }
        out
    }
}

impl Default for TailShape {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const DEFAULT_STEP_FACTOR: f64 = 1e-3;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
/// Finite-difference step as a fraction of `r_ref`.
pub const FD_FACTOR: f64 = 1e-4;
pub const MAX_HALVINGS: usize = 20;
pub const P0_RANGE: (f64, f64) = (1.0, 2.5);
/// Largest admissible `r_1 / r_min`.
pub const MAX_WIDTH_RATIO: f64 = 2.0;

/// `1.00, 1.05, ..., 2.50`.
pub fn default_p0_grid() -> Vec<f64> {
    (0..=30).map(|i| 1.0 + 0.05 * i as f64).collect()
}

/// Outcome of one parameter optimization at fixed `p0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optimized {
    pub params: PcfParams,
    pub report: RealizabilityReport,
    pub iterations: usize,
}

/// Minimum-power evaluations along the family at fixed `p0` and tail.
struct Objective<'a> {
    spec: &'a DesignSpec,
    k_grid: &'a SpectralGrid,
    family: Family,
    p0: f64,
    tail: TailShape,
}

impl Objective<'_> {
    fn params(&self, r_min: f64, ratio: f64) -> PcfParams {
        match self.family {
            Family::Pds => PcfParams::pds(r_min),
            Family::Sfsd => PcfParams::sfsd(r_min, ratio * r_min, self.p0),
            Family::Proposed => {
                PcfParams::proposed(r_min, ratio * r_min, self.p0, self.tail.at_radius(r_min))
            }
        }
    }

    /// Realizability over the full grid; a negative PCF counts as infeasible.
    fn evaluate(&self, p: &PcfParams) -> Result<RealizabilityReport> {
        if !pcf_nonnegative(p) {
            return Ok(RealizabilityReport {
                feasible: false,
                min_power: f64::NEG_INFINITY,
                argmin_k: f64::NAN,
            });
        }
        Ok(report(&psd_from_params(
            p,
            self.spec.n(),
            self.spec.d(),
            self.k_grid,
        )?))
    }

    fn power_at(&self, p: &PcfParams, k: f64) -> Result<f64> {
        Ok(PsdKernel::from_params(p, self.spec.n(), self.spec.d(), k)?.power(k))
    }

    /// Largest feasible `r_min` along the ray `r_1 = ratio r_min`, starting
    /// near `start`. Newton steps on the scale factor use
    /// `P = 1 + N r^d Phi(k r)`; bisection takes over when they leave the
    /// bracket. Exits once the feasible end of the bracket is within
    /// `rel_tol` of the infeasible end or of the zero crossing.
    fn boundary(&self, ratio: f64, start: f64, rel_tol: f64) -> Result<(f64, RealizabilityReport)> {
        let d = self.spec.d() as f64;
        let target = -0.5 * REALIZABILITY_TOLERANCE;
        let mut lo: Option<(f64, RealizabilityReport)> = None;
        let mut hi: Option<f64> = None;
        let mut r = start;
        for _ in 0..200 {
            let rep = self.evaluate(&self.params(r, ratio))?;
            if rep.feasible {
                if lo.map_or(true, |(l, _)| r > l) {
                    lo = Some((r, rep));
                }
            } else {
                hi = Some(hi.map_or(r, |h: f64| h.min(r)));
            }
            if let (Some((l, lrep)), Some(h)) = (lo, hi) {
                let close = lrep.min_power <= 0.1 * REALIZABILITY_TOLERANCE && rel_tol >= 1e-6;
                if h - l <= rel_tol * l || close {
                    return Ok((l, lrep));
                }
            }
            let newton = if rep.min_power.is_finite() && rep.min_power < 1.0 {
                r * ((1.0 - target) / (1.0 - rep.min_power)).powf(1.0 / d)
            } else {
                f64::NAN
            };
            let low = lo.map_or(0.0, |(l, _)| l);
            let high = hi.unwrap_or(f64::INFINITY);
            r = if newton > low && newton < high && (newton - r).abs() > 0.1 * rel_tol * r {
                newton
            } else {
                match (lo, hi) {
                    (Some((l, _)), Some(h)) => 0.5 * (l + h),
                    (Some((l, _)), None) => 1.25 * l,
                    (None, Some(h)) => 0.5 * h,
                    (None, None) => unreachable!("every evaluation updates one side"),
                }
            };
            if r < start * 0.5f64.powi(MAX_HALVINGS as i32) {
                break;
            }
        }
        lo.ok_or_else(|| {
            Error::InfeasibleDesign(format!("no feasible r_min at r_1/r_min = {ratio}"))
        })
    }
}

/// `G >= 0` everywhere; only the oscillation tail can violate it.
pub fn pcf_nonnegative(p: &PcfParams) -> bool {
    let osc = p.oscillation();
    if p.family != Family::Proposed || osc.a == 0.0 {
        return true;
    }
    let start = p.r_1.max(p.r_min);
    if osc.envelope(start) <= 1.0 {
        return true;
    }
    // the envelope exceeds one only on an initial stretch; scan it densely
    let mut end = start;
    while osc.envelope(end) > 1.0 {
        end += start.max(1e-12);
    }
    let period = if osc.c > 0.0 {
        1.0 / osc.c
    } else {
        end - start
    };
    let samples = ((64.0 * (end - start) / period).ceil() as usize).clamp(64, 1 << 20);
    (0..=samples).all(|j| {
        let r = start + (end - start) * j as f64 / samples as f64;
        r <= start || 1.0 + osc.value(r) >= 0.0
    })
}

/// Maximal-coverage parameters for one family at fixed `p0` and tail.
///
/// Starts from `r_min = r_ref`, `r_1 = 2 r_min`, halving both until the
/// spectrum is non-negative. From there `r_min` is held on the feasibility
/// boundary `min P = 0` while `r_1` ascends `P(k*)` by
/// `r_1 += step r_min dP(k*)/dr_1`, clamped to `[r_min, 2 r_min]`. Accepted
/// moves double the step and rejected ones halve it. `step` is in units of
/// `r_ref`; `step = 0` returns the pre-scaled start unchanged.
pub fn optimize_parameters(
    spec: &DesignSpec,
    family: Family,
    p0: f64,
    tail: TailShape,
    step: f64,
    max_iters: usize,
) -> Result<Optimized> {
    if !(p0 >= 1.0) || !p0.is_finite() {
        return Err(Error::invalid(format!("p0 must be at least 1, got {p0}")));
    }
    if !(step >= 0.0) || !step.is_finite() {
        return Err(Error::invalid(format!(
            "step must be non-negative, got {step}"
        )));
    }
    let k_grid = default_spectral_grid(spec);
    let obj = Objective {
        spec,
        k_grid: &k_grid,
        family,
        p0,
        tail,
    };
    let r_ref = reference_radius(spec);

    let mut ratio = if family == Family::Pds {
        1.0
    } else {
        MAX_WIDTH_RATIO
    };
    let mut r = r_ref;
    let mut start = None;
    for _ in 0..=MAX_HALVINGS {
        let rep = obj.evaluate(&obj.params(r, ratio))?;
        if rep.feasible {
            start = Some(rep);
            break;
        }
        r *= 0.5;
    }
    let Some(start) = start else {
        return Err(Error::InfeasibleDesign(format!(
            "{family} with p0 = {p0}: no feasible start after {MAX_HALVINGS} halvings"
        )));
    };
    if step == 0.0 {
        return Ok(Optimized {
            params: obj.params(r, ratio),
            report: start,
            iterations: 0,
        });
    }

    let (mut r, mut rep) = obj.boundary(ratio, r, 1e-6)?;
    let h = FD_FACTOR * r_ref;
    let mut lambda = step * r_ref;
    let mut iterations = 0;
    if family != Family::Pds {
        while iterations < max_iters {
            iterations += 1;
            let p = obj.params(r, ratio);
            let k = rep.argmin_k;
            let g = (obj.power_at(&p.with_radii(r, p.r_1 + h), k)?
                - obj.power_at(&p.with_radii(r, p.r_1 - h), k)?)
                / (2.0 * h);
            let move_len = lambda * r * g;
            let trial = ((p.r_1 + move_len) / r).clamp(1.0, MAX_WIDTH_RATIO);
            if (trial - ratio).abs() * r < 1e-6 * r_ref {
                break;
            }
            let (r_new, rep_new) = obj.boundary(trial, r, 1e-6)?;
            if r_new > r {
                r = r_new;
                rep = rep_new;
                ratio = trial;
                lambda *= 2.0;
            } else {
                lambda *= 0.5;
            }
        }
    }
    let (r, rep) = obj.boundary(ratio, r, 1e-10)?;
    Ok(Optimized {
        params: obj.params(r, ratio),
        report: rep,
        iterations,
    })
}

/// Largest feasible `r_min` at a fixed shape `r_1 = ratio r_min`, to
/// relative precision `1e-10`.
pub fn max_feasible_radius(
    spec: &DesignSpec,
    family: Family,
    p0: f64,
    ratio: f64,
    tail: TailShape,
) -> Result<(PcfParams, RealizabilityReport)> {
    if !(1.0..=MAX_WIDTH_RATIO).contains(&ratio) {
        return Err(Error::invalid(format!(
            "r_1 / r_min = {ratio} outside [1, {MAX_WIDTH_RATIO}]"
        )));
    }
    let k_grid = default_spectral_grid(spec);
    let obj = Objective {
        spec,
        k_grid: &k_grid,
        family,
        p0,
        tail,
    };
    let (r, rep) = obj.boundary(ratio, reference_radius(spec), 1e-10)?;
    Ok((obj.params(r, ratio), rep))
}

/// Best design found for one family, re-verified after the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageReport {
    pub n: usize,
    pub d: usize,
    pub params: PcfParams,
    pub rho: f64,
    pub feasible: bool,
    pub min_power: f64,
    pub argmin_k: f64,
}

impl CoverageReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are always representable")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("bad coverage report: {e}")))
    }

    pub fn spec(&self) -> Result<DesignSpec> {
        DesignSpec::new(self.n, self.d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub p0_grid: Vec<f64>,
    pub tail: TailShape,
    /// Also try every shape in [`TailShape::sweep_grid`].
    pub tail_sweep: bool,
    pub step: f64,
    pub max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            p0_grid: default_p0_grid(),
            tail: TailShape::DEFAULT,
            tail_sweep: false,
            step: DEFAULT_STEP_FACTOR,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Runs [`optimize_parameters`] for every `p0` (and tail, when sweeping) and
/// keeps the largest feasible `r_min`. PDS has no shape freedom and reduces
/// to [`max_feasible_radius`].
pub fn search_design(
    spec: &DesignSpec,
    family: Family,
    options: &SearchOptions,
    table: &PackingTable,
) -> Result<CoverageReport> {
    let (lo, hi) = P0_RANGE;
    if options.p0_grid.is_empty() {
        return Err(Error::invalid("p0 grid is empty"));
    }
    if let Some(p0) = options.p0_grid.iter().find(|p| !(lo..=hi).contains(*p)) {
        return Err(Error::invalid(format!("p0 = {p0} outside [{lo}, {hi}]")));
    }
    let best = match family {
        Family::Pds => max_feasible_radius(spec, family, 1.0, 1.0, options.tail)?.0,
        _ => {
            let tails = if family == Family::Proposed && options.tail_sweep {
                let mut t = vec![options.tail];
                t.extend(TailShape::sweep_grid());
                t
            } else {
                vec![options.tail]
            };
            let mut best: Option<PcfParams> = None;
            let mut last_err = None;
            for tail in &tails {
                for &p0 in &options.p0_grid {
                    match optimize_parameters(
                        spec,
                        family,
                        p0,
                        *tail,
                        options.step,
                        options.max_iters,
                    ) {
                        Ok(o) if best.map_or(true, |b| o.params.r_min > b.r_min) => {
                            best = Some(o.params)
                        }
                        Ok(_) => {}
                        Err(e @ Error::InfeasibleDesign(_)) => last_err = Some(e),
                        Err(e) => return Err(e),
                    }
                }
            }
            match best {
                Some(b) => b,
                None => {
                    return Err(last_err
                        .unwrap_or_else(|| Error::InfeasibleDesign("no feasible design".into())))
                }
            }
        }
    };
    verify(spec, &best, table)
}

/// Recomputes realizability for `params` from scratch.
pub fn verify(
    spec: &DesignSpec,
    params: &PcfParams,
    table: &PackingTable,
) -> Result<CoverageReport> {
    let k_grid = default_spectral_grid(spec);
    let rep = report(&psd_from_params(params, spec.n(), spec.d(), &k_grid)?);
    let feasible = rep.feasible && pcf_nonnegative(params);
    if !feasible {
        return Err(Error::Numerical(format!(
            "re-verification failed for {params:?}: min P = {}",
            rep.min_power
        )));
    }
    Ok(CoverageReport {
        n: spec.n(),
        d: spec.d(),
        params: *params,
        rho: relative_radius(params.r_min, spec, table)?,
        feasible,
        min_power: rep.min_power,
        argmin_k: rep.argmin_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_radius_examples() {
        let r = reference_radius(&DesignSpec::new(100, 2).unwrap());
        assert!((r - (1.0 / (100.0 * PI)).sqrt()).abs() < 1e-15);
        assert!((r - 0.056419).abs() < 1e-6);
        let r3 = reference_radius(&DesignSpec::new(1000, 3).unwrap());
        assert!((r3 - 0.062035).abs() < 1e-5);
        let r4n = reference_radius(&DesignSpec::new(400, 2).unwrap());
        assert!((r4n - 0.5 * r).abs() < 1e-15);
    }

    #[test]
    fn packing_constants_match_published_decimals() {
        let published = [
            (2, 0.9068996821171089),
            (3, 0.7404804896930610),
            (4, 0.6168502750680849),
            (5, 0.4652576133092586),
            (6, 0.3729475455820649),
            (7, 0.2952978731457214),
            (8, 0.2536695079010480),
        ];
        let table = PackingTable::standard();
        for (d, g) in published {
            assert!((table.gamma(d).unwrap() - g).abs() < 1e-12, "d = {d}");
        }
        assert!(table.gamma(9).is_err());
        assert!(PackingTable::from_entries(vec![(2, 1.2)]).is_err());
    }

    #[test]
    fn max_and_relative_radius() {
        let spec = DesignSpec::new(1000, 2).unwrap();
        let table = PackingTable::standard();
        let rmax = max_radius(&spec, &table).unwrap();
        assert!((rmax - 0.016990).abs() < 1e-6);
        let g = table.gamma(2).unwrap();
        assert!((rmax - g.sqrt() * reference_radius(&spec)).abs() < 1e-15);
        let unit = PackingTable::from_entries(vec![(2, 1.0)]).unwrap();
        assert_eq!(max_radius(&spec, &unit).unwrap(), reference_radius(&spec));
        assert!((relative_radius(rmax, &spec, &table).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(relative_radius(0.0, &spec, &table).unwrap(), 0.0);
        assert!(relative_radius(-1.0, &spec, &table).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::new(1, 2).is_err());
        assert!(DesignSpec::new(10, 1).is_err());
        assert!(DesignSpec::new(10, 9).is_err());
        assert_eq!(DesignSpec::new(10, 8).unwrap().volume(), 1.0);
    }

    #[test]
    fn default_p0_grid_spans_range() {
        let g = default_p0_grid();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], 1.0);
        assert!((g[30] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_step_returns_start() {
        let spec = DesignSpec::new(1000, 2).unwrap();
        let o =
            optimize_parameters(&spec, Family::Sfsd, 1.3, TailShape::DEFAULT, 0.0, 100).unwrap();
        let r = reference_radius(&spec);
        // r_ref with r_1 = 2 r_ref is already feasible here
        assert_eq!(o.params.r_min, r);
        assert_eq!(o.params.r_1, 2.0 * r);
        assert_eq!(o.iterations, 0);
        assert!(o.report.feasible);
    }

    #[test]
    fn optimizer_contract() {
        let spec = DesignSpec::new(300, 3).unwrap();
        for family in [Family::Sfsd, Family::Proposed] {
            let o = optimize_parameters(
                &spec,
                family,
                1.8,
                TailShape::DEFAULT,
                DEFAULT_STEP_FACTOR,
                200,
            )
            .unwrap();
            assert!(o.params.r_1 >= o.params.r_min);
            assert!(o.params.r_1 <= MAX_WIDTH_RATIO * o.params.r_min * (1.0 + 1e-12));
            assert!(o.report.min_power >= -REALIZABILITY_TOLERANCE);
            assert!(pcf_nonnegative(&o.params));
        }
    }

    #[test]
    fn optimizer_rejects_bad_inputs() {
        let spec = DesignSpec::new(100, 2).unwrap();
        assert!(
            optimize_parameters(&spec, Family::Sfsd, 0.9, TailShape::DEFAULT, 1e-3, 10).is_err()
        );
        assert!(
            optimize_parameters(&spec, Family::Sfsd, 1.2, TailShape::DEFAULT, -1.0, 10).is_err()
        );
        let opts = SearchOptions {
            p0_grid: vec![],
            ..Default::default()
        };
        assert!(search_design(&spec, Family::Sfsd, &opts, &PackingTable::standard()).is_err());
        let opts = SearchOptions {
            p0_grid: vec![3.0],
            ..Default::default()
        };
        assert!(search_design(&spec, Family::Sfsd, &opts, &PackingTable::standard()).is_err());
    }

    #[test]
    fn single_point_grid_equals_optimizer() {
        let spec = DesignSpec::new(500, 2).unwrap();
        let opts = SearchOptions {
            p0_grid: vec![1.0],
            ..Default::default()
        };
        let table = PackingTable::standard();
        let rep = search_design(&spec, Family::Sfsd, &opts, &table).unwrap();
        let o = optimize_parameters(
            &spec,
            Family::Sfsd,
            1.0,
            TailShape::DEFAULT,
            DEFAULT_STEP_FACTOR,
            DEFAULT_MAX_ITERS,
        )
        .unwrap();
        assert_eq!(rep.params, o.params);
        assert_eq!(
            rep.rho,
            relative_radius(o.params.r_min, &spec, &table).unwrap()
        );
    }

    #[test]
    fn report_round_trip_and_reverification() {
        let spec = DesignSpec::new(200, 2).unwrap();
        let table = PackingTable::standard();
        let rep = search_design(&spec, Family::Pds, &SearchOptions::default(), &table).unwrap();
        assert!(rep.feasible && rep.min_power >= -REALIZABILITY_TOLERANCE);
        assert_eq!(CoverageReport::from_toml(&rep.to_toml()).unwrap(), rep);
        assert!(CoverageReport::from_toml("n = 3\n").is_err());
        let too_big = PcfParams::pds(2.0 * reference_radius(&spec));
        assert!(matches!(
            verify(&spec, &too_big, &table),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn negative_tail_detected() {
        let bad = PcfParams::proposed(
            0.01,
            0.012,
            1.5,
            Oscillation {
                a: 0.5,
                b: 4.0,
                c: 300.0,
                phase: 0.0,
            },
        );
        assert!(!pcf_nonnegative(&bad));
        assert!(pcf_nonnegative(&PcfParams::proposed(
            0.01,
            0.012,
            1.5,
            TailShape::DEFAULT.at_radius(0.01)
        )));
        assert!(pcf_nonnegative(&PcfParams::sfsd(0.01, 0.012, 1.5)));
    }

    #[test]
    fn pds_boundary_matches_small_k_limit() {
        // P(k -> 0) = 1 - (r_min / r_ref)^d, so the boundary sits just below r_ref
        let spec = DesignSpec::new(1000, 2).unwrap();
        let (p, rep) =
            max_feasible_radius(&spec, Family::Pds, 1.0, 1.0, TailShape::DEFAULT).unwrap();
        let r = reference_radius(&spec);
        assert!(
            p.r_min <= r * 1.001 && p.r_min > 0.99 * r,
            "{} vs {r}",
            p.r_min
        );
        assert!(rep.feasible);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reference_radius_scales_as_power_law(n in 2usize..100_000, d in 2usize..=8) {
            let a = reference_radius(&DesignSpec::new(n, d).unwrap());
            let b = reference_radius(&DesignSpec::new(2 * n, d).unwrap());
            prop_assert!((a / b - 2f64.powf(1.0 / d as f64)).abs() < 1e-12);
        }

        #[test]
        fn max_radius_below_reference(n in 2usize..100_000, d in 2usize..=8) {
            let spec = DesignSpec::new(n, d).unwrap();
            let rmax = max_radius(&spec, &PackingTable::standard()).unwrap();
            prop_assert!(rmax > 0.0 && rmax < reference_radius(&spec));
        }

        #[test]
        fn tail_shape_is_scale_free(r in 1e-4f64..1.0, x in 1.0f64..20.0) {
            let osc = TailShape::DEFAULT.at_radius(r);
            let unit = TailShape::DEFAULT.at_radius(1.0);
            prop_assert!((osc.value(x * r) - unit.value(x)).abs() < 1e-9);
        }
    }
}
