use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pointset::{squared_distance, PointSet};
use crate::design::DesignSpec;
use crate::error::{Error, Result};

/// Rejection sampling of `spec.n()` points at pairwise distance `>= r_min`.
/// Gives up after `max_failures` consecutive rejections.
pub fn dart_throwing(
    r_min: f64,
    spec: &DesignSpec,
    max_failures: usize,
    seed: u64,
) -> Result<PointSet> {
    if !(r_min >= 0.0) || !r_min.is_finite() {
        return Err(Error::invalid(format!(
            "r_min must be non-negative, got {r_min}"
        )));
    }
    let (n, d) = (spec.n(), spec.d());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = PointSet::new(d, Vec::with_capacity(n * d))?;
    let r2 = r_min * r_min;
    let mut candidate = vec![0.0; d];
    let mut failures = 0;
    while points.n() < n {
        candidate.iter_mut().for_each(|c| *c = rng.gen::<f64>());
        if points.iter().all(|p| squared_distance(p, &candidate) >= r2) {
            points.push(&candidate)?;
            failures = 0;
        } else {
            failures += 1;
            if failures >= max_failures {
                return Err(Error::PartialDesign {
                    achieved: points.n(),
                    requested: n,
                });
            }
        }
    }
    Ok(points.with_meta("dart", Some(seed), None))
}
