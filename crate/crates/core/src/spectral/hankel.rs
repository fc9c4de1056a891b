//! Composite Gauss-Legendre quadrature for Hankel-type integrals.
//!
//! Integrands are assembled as `(r_j, c_j)` pairs where `c_j` already holds
//! the quadrature weight times the non-Bessel part of the integrand, so one
//! node set can be reused across many frequencies.

use std::f64::consts::PI;

use super::bessel::{bessel_j_unchecked, BesselOrder};
use crate::error::{Error, Result};
use crate::pcf::{Family, RadialProfile};

/// Gauss-Legendre panels per period of the fastest oscillation.
pub const PANELS_PER_OSCILLATION: f64 = 2.0;
/// Lower bound on panels per smooth segment of a closed-form profile.
pub const MIN_PANELS: usize = 4;

// positive halves of the symmetric Gauss-Legendre rules on [-1, 1]
const GL8_X: [f64; 4] = [
    0.18343464249564978,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975362,
];
const GL8_W: [f64; 4] = [
    0.36268378337836177,
    0.31370664587788705,
    0.22238103445337434,
    0.10122853629037669,
];
const GL4_X: [f64; 2] = [0.33998104358485626, 0.8611363115940526];
const GL4_W: [f64; 2] = [0.6521451548625462, 0.3478548451374537];

/// Nodes and pre-multiplied weights of one integrand.
#[derive(Clone, Debug, Default)]
pub(crate) struct WeightedNodes {
    pub r: Vec<f64>,
    pub c: Vec<f64>,
}

impl WeightedNodes {
    /// Gauss-Legendre panels on each `[breaks[i], breaks[i+1]]`. Nodes are
    /// interior, so jumps at breakpoints never get sampled. `cycles` is the
    /// fastest oscillation of the integrand in periods per unit length.
    pub fn gauss_legendre<F: Fn(f64) -> f64>(
        breaks: &[f64],
        cycles: f64,
        min_panels: usize,
        f: F,
    ) -> Self {
        let mut out = WeightedNodes::default();
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if !(b > a) {
                continue;
            }
            let periods = cycles * (b - a);
            let panels = ((PANELS_PER_OSCILLATION * periods).ceil() as usize)
                .max(min_panels)
                .max(1);
            let (xs, ws): (&[f64], &[f64]) = if panels == 1 && periods < 0.25 {
                (&GL4_X, &GL4_W)
            } else {
                (&GL8_X, &GL8_W)
            };
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let mid = a + (p as f64 + 0.5) * h;
                let half = 0.5 * h;
                for (&x, &w) in xs.iter().zip(ws) {
                    for r in [mid - half * x, mid + half * x] {
                        out.r.push(r);
                        out.c.push(half * w * f(r));
                    }
                }
            }
        }
        out
    }

    /// `sum_j c_j J_order(k r_j)`.
    pub fn transform(&self, order: BesselOrder, k: f64) -> f64 {
        self.r
            .iter()
            .zip(&self.c)
            .map(|(&r, &c)| {
                if c == 0.0 {
                    0.0
                } else {
                    c * bessel_j_unchecked(order, k * r)
                }
            })
            .sum()
    }
}

/// Breakpoints of `profile` inside `(0, r_upper)`: jump locations for the
/// closed-form families, every sample for interpolated profiles.
pub(crate) fn breakpoints(profile: &RadialProfile, r_upper: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    match profile.params() {
        Some(p) => {
            breaks.push(p.r_min);
            if p.family != Family::Pds {
                breaks.push(p.r_1);
            }
        }
        None => breaks.extend_from_slice(profile.grid().points()),
    }
    breaks.retain(|&r| r < r_upper);
    breaks.push(r_upper);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Spatial frequency (cycles per unit length) of the fastest non-Bessel
/// oscillation in `profile`.
pub(crate) fn profile_frequency(profile: &RadialProfile) -> f64 {
    profile
        .params()
        .filter(|p| p.family == Family::Proposed && p.a != 0.0)
        .map(|p| p.c.abs())
        .unwrap_or(0.0)
}

/// Periods per unit length of `J(k r)` for `k <= k_max` multiplied by a
/// factor oscillating at `extra_cycles` per unit length.
pub(crate) fn oscillation_cycles(k_max: f64, extra_cycles: f64) -> f64 {
    k_max / (2.0 * PI) + extra_cycles
}

/// `int_0^{r_upper} r J_order(k r) f(r) dr`, with `f` evaluated through
/// [`RadialProfile::value_at`].
pub fn hankel_transform(f: &RadialProfile, order: f64, k: f64, r_upper: f64) -> Result<f64> {
    let order = BesselOrder::new(order)?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!(
            "frequency must be positive, got {k}"
        )));
    }
    if !(r_upper >= f.grid().r_cut()) {
        return Err(Error::invalid(format!(
            "upper limit {r_upper} is inside the profile grid (r_cut = {})",
            f.grid().r_cut()
        )));
    }
    let breaks = breakpoints(f, r_upper);
    let min_panels = if f.params().is_some() { MIN_PANELS } else { 1 };
    let nodes = WeightedNodes::gauss_legendre(
        &breaks,
        oscillation_cycles(k, profile_frequency(f)),
        min_panels,
        |r| r * f.value_at(r),
    );
    Ok(nodes.transform(order, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcf::{make_radial_grid, PcfParams};
    use crate::spectral::bessel::bessel_j;

    #[test]
    fn zero_integrand() {
        let grid = make_radial_grid(1.0, 50).unwrap();
        let zero = RadialProfile::from_values(grid, vec![0.0; 50]).unwrap();
        for k in [0.5, 3.0, 40.0] {
            assert_eq!(hankel_transform(&zero, 0.0, k, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn step_against_closed_form() {
        // int_R^U r J_0(k r) dr = (U J_1(k U) - R J_1(k R)) / k
        let (radius, upper) = (0.37, 1.0);
        let grid = make_radial_grid(upper, 100).unwrap();
        let step = RadialProfile::from_params(PcfParams::pds(radius), &grid).unwrap();
        for &k in &[0.3, 1.0, 4.0, 9.5, 20.0, 75.0] {
            let got = hankel_transform(&step, 0.0, k, upper).unwrap();
            let want = (upper * bessel_j(1.0, k * upper).unwrap()
                - radius * bessel_j(1.0, k * radius).unwrap())
                / k;
            let scale = want.abs().max(1e-3 * upper * upper);
            assert!(
                (got - want).abs() <= 1e-6 * scale,
                "k = {k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn linear_in_the_profile() {
        let grid = make_radial_grid(1.0, 40).unwrap();
        let f = RadialProfile::from_values(
            grid.clone(),
            (0..40).map(|j| (j as f64 * 0.3).sin() + 1.0).collect(),
        )
        .unwrap();
        let g = RadialProfile::from_values(grid.clone(), (0..40).map(|j| (j % 5) as f64).collect())
            .unwrap();
        let (alpha, beta) = (0.7, 2.5);
        let mix = f.combine(alpha, &g, beta).unwrap();
        for &k in &[0.5, 6.0, 33.0] {
            let lhs = hankel_transform(&mix, 1.0, k, 1.0).unwrap();
            let rhs = alpha * hankel_transform(&f, 1.0, k, 1.0).unwrap()
                + beta * hankel_transform(&g, 1.0, k, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_non_positive_frequency_and_short_range() {
        let grid = make_radial_grid(1.0, 4).unwrap();
        let f = RadialProfile::from_values(grid, vec![1.0; 4]).unwrap();
        assert!(matches!(
            hankel_transform(&f, 0.0, 0.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(hankel_transform(&f, 0.0, -2.0, 1.0).is_err());
        assert!(hankel_transform(&f, 0.0, 2.0, 0.5).is_err());
        assert!(hankel_transform(&f, 0.7, 2.0, 1.0).is_err());
    }
}
