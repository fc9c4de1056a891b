use covdesign::design::{
    default_spectral_grid, optimize_parameters, reference_radius, DesignSpec, TailShape,
    DEFAULT_MAX_ITERS, DEFAULT_STEP_FACTOR,
};
use covdesign::pcf::{Family, PcfParams};
use covdesign::spectral::{psd_from_params, REALIZABILITY_TOLERANCE};

/// Largest feasible `r_min` on a uniform grid at a fixed shape, found by
/// plain enumeration rather than root finding.
fn dense_sweep(spec: &DesignSpec, ratio: f64, p0: f64, lo: f64, hi: f64, m: usize) -> f64 {
    let k_grid = default_spectral_grid(spec);
    let mut best = 0.0;
    for j in 0..=m {
        let r = lo + (hi - lo) * j as f64 / m as f64;
        let psd = psd_from_params(
            &PcfParams::sfsd(r, ratio * r, p0),
            spec.n(),
            spec.d(),
            &k_grid,
        )
        .unwrap();
        if psd.min().0 >= -REALIZABILITY_TOLERANCE {
            best = r;
        }
    }
    best
}

#[test]
fn optimizer_reaches_dense_sweep_boundary() {
    let spec = DesignSpec::new(1000, 2).unwrap();
    let o = optimize_parameters(
        &spec,
        Family::Sfsd,
        1.3,
        TailShape::DEFAULT,
        DEFAULT_STEP_FACTOR,
        DEFAULT_MAX_ITERS,
    )
    .unwrap();
    let ratio = o.params.r_1 / o.params.r_min;
    let r_ref = reference_radius(&spec);
    let swept = dense_sweep(&spec, ratio, 1.3, 0.5 * r_ref, 2.0 * r_ref, 300);
    assert!(swept > 0.0);
    let rel = (o.params.r_min - swept).abs() / swept;
    assert!(rel <= 0.02, "optimizer {} vs sweep {swept}", o.params.r_min);
}
