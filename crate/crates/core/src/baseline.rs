//! Reference exploratory designs: uniform random, Latin hypercube and Sobol.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::synthesis::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Lhs,
    Sobol,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Lhs => "lhs",
            Method::Sobol => "sobol",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "uniform" => Ok(Method::Random),
            "lhs" => Ok(Method::Lhs),
            "sobol" => Ok(Method::Sobol),
            other => Err(Error::invalid(format!("unknown baseline method '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub method: Method,
    pub seed: u64,
    /// Sobol burn-in; index 0 (the origin) is always skipped.
    pub skip: u64,
}

impl GeneratorConfig {
    pub fn new(method: Method, seed: u64) -> Self {
        Self {
            method,
            seed,
            skip: 1,
        }
    }
}

/// Seed of trial `index` in a multi-trial experiment.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

pub fn generate(spec: &DesignSpec, cfg: &GeneratorConfig) -> Result<PointSet> {
    match cfg.method {
        Method::Random => Ok(uniform_random(spec, cfg.seed)),
        Method::Lhs => Ok(lhs(spec, cfg.seed)),
        Method::Sobol => sobol(spec, cfg.skip),
    }
}

/// `N` i.i.d. uniform points in `[0, 1)^d`.
pub fn uniform_random(spec: &DesignSpec, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..spec.n() * spec.d()).map(|_| rng.gen::<f64>()).collect();
    PointSet::new(spec.d(), coords)
        .expect("uniform draws lie in the unit cube")
        .with_meta("random", Some(seed), None)
}

/// Latin hypercube: each axis gets its own permutation of the `N` strata, and
/// every point is jittered uniformly inside its stratum.
pub fn lhs(spec: &DesignSpec, seed: u64) -> PointSet {
    lhs_points(spec.n(), spec.d(), seed)
}

fn lhs_points(n: usize, d: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![0.0; n * d];
    let mut strata: Vec<usize> = (0..n).collect();
    for p in 0..d {
        strata.shuffle(&mut rng);
        for (i, &s) in strata.iter().enumerate() {
            // (s + u) / n < 1 can round up to 1 when u is within an ulp of 1
            let x: f64 = (s as f64 + rng.gen::<f64>()) / n as f64;
            coords[i * d + p] = x.min(1.0 - f64::EPSILON / 2.0);
        }
    }
    PointSet::new(d, coords)
        .expect("strata lie in the unit cube")
        .with_meta("lhs", Some(seed), None)
}

/// Primitive-polynomial degree `s`, its interior coefficients `a` and the
/// initial direction integers `m_1..m_s` for dimensions 2 to 8, from the
/// Joe and Kuo (2008) `new-joe-kuo-6.21201` table.
const JOE_KUO: [(u32, u32, &[u32]); 7] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

const SOBOL_BITS: usize = 32;
pub const SOBOL_MAX_DIM: usize = 8;

/// Direction numbers `v_k = m_k 2^(32 - k)` for one dimension.
fn direction_numbers(dim: usize) -> [u32; SOBOL_BITS] {
    let mut v = [0u32; SOBOL_BITS];
    if dim == 0 {
        for (k, v) in v.iter_mut().enumerate() {
            *v = 1 << (SOBOL_BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m_init) = JOE_KUO[dim - 1];
    let s = s as usize;
    let mut m = [0u32; SOBOL_BITS];
    m[..s].copy_from_slice(m_init);
    for k in s..SOBOL_BITS {
        let mut mk = m[k - s] ^ (m[k - s] << s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                mk ^= m[k - j] << j;
            }
        }
        m[k] = mk;
    }
    for k in 0..SOBOL_BITS {
        v[k] = m[k] << (SOBOL_BITS - 1 - k);
    }
    v
}

/// Points `skip..skip + N` of the unscrambled Sobol sequence in Gray-code
/// order, which starts 0, 0.5, 0.75, 0.25 in the first dimension.
pub fn sobol(spec: &DesignSpec, skip: u64) -> Result<PointSet> {
    sobol_points(spec.n(), spec.d(), skip)
}

fn sobol_points(n: usize, d: usize, skip: u64) -> Result<PointSet> {
    if d > SOBOL_MAX_DIM {
        return Err(Error::invalid(format!(
            "Sobol directions are tabulated up to d = {SOBOL_MAX_DIM}, got {d}"
        )));
    }
    if skip == 0 {
        return Err(Error::invalid(
            "Sobol skip must be at least 1; the origin is always dropped",
        ));
    }
    let last = skip.checked_add(n as u64).filter(|&l| l <= 1 << SOBOL_BITS);
    if last.is_none() {
        return Err(Error::invalid("Sobol index range exceeds 2^32 points"));
    }
    let dirs: Vec<[u32; SOBOL_BITS]> = (0..d).map(direction_numbers).collect();
    let scale = 1.0 / (1u64 << SOBOL_BITS) as f64;
    let mut coords = Vec::with_capacity(n * d);
    for i in skip..skip + n as u64 {
        let gray = (i ^ (i >> 1)) as u32;
        for v in &dirs {
            let x = (0..SOBOL_BITS)
                .filter(|&k| (gray >> k) & 1 == 1)
                .fold(0u32, |x, k| x ^ v[k]);
            coords.push(x as f64 * scale);
        }
    }
    Ok(PointSet::new(d, coords)?.with_meta("sobol", None, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n: usize, d: usize) -> DesignSpec {
        DesignSpec::new(n, d).unwrap()
    }

    #[test]
    fn uniform_is_deterministic_and_centred() {
        let s = spec(10_000, 3);
        let a = uniform_random(&s, 5);
        assert_eq!(a, uniform_random(&s, 5));
        assert_ne!(a, uniform_random(&s, 6));
        assert!(a.coords().iter().all(|c| (0.0..1.0).contains(c)));
        let bound = 3.0 / (12.0 * 10_000f64).sqrt();
        for p in 0..3 {
            let mean = a.iter().map(|x| x[p]).sum::<f64>() / 10_000.0;
            assert!((mean - 0.5).abs() < bound, "axis {p}: {mean}");
        }
    }

    #[test]
    fn lhs_single_point() {
        // a single-sample design is below DesignSpec's minimum, so go direct
        let p = lhs_points(1, 4, 2);
        assert_eq!(p.n(), 1);
        assert!(p.coords().iter().all(|c| (0.0..1.0).contains(c)));
        assert_eq!(p, lhs_points(1, 4, 2));
    }

    #[test]
    fn sobol_matches_reference_values() {
        // unscrambled Joe-Kuo sequence, indices 1..=4 and 1000
        let p = sobol(&spec(4, 8), 1).unwrap();
        let want: [[f64; 8]; 4] = [
            [0.5; 8],
            [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75],
            [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25],
            [0.375, 0.375, 0.625, 0.875, 0.375, 0.125, 0.375, 0.875],
        ];
        for (got, want) in p.iter().zip(&want) {
            assert_eq!(got, want);
        }
        let far = sobol(&spec(2, 8), 1000).unwrap();
        let want = [
            0.2197265625,
            0.0966796875,
            0.5185546875,
            0.6767578125,
            0.2802734375,
            0.9072265625,
            0.0458984375,
            0.8994140625,
        ];
        assert_eq!(far.point(0), &want);
    }

    #[test]
    fn sobol_first_dimension_is_gray_coded_van_der_corput() {
        let p = sobol(&spec(64, 2), 1).unwrap();
        for (i, x) in (1u64..).zip(p.iter().map(|x| &x[0])) {
            let g = i ^ (i >> 1);
            let radical = (0..64)
                .filter(|b| (g >> b) & 1 == 1)
                .map(|b| 0.5f64.powi(b + 1))
                .sum::<f64>();
            assert_eq!(*x, radical);
        }
    }

    #[test]
    fn sobol_rejects_bad_arguments() {
        assert!(sobol(&spec(4, 2), 0).is_err());
        assert!(matches!(
            sobol_points(4, 9, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(sobol_points(4, 2, u64::MAX - 2).is_err());
        assert_eq!(
            sobol(&spec(16, 3), 7).unwrap(),
            sobol(&spec(16, 3), 7).unwrap()
        );
    }

    /// Largest |fraction in [0, b) - volume| over boxes whose upper corner
    /// uses point coordinates (and 1) on each axis.
    fn star_discrepancy(p: &PointSet) -> f64 {
        let mut xs: Vec<f64> = p.iter().map(|x| x[0]).chain([1.0]).collect();
        let mut ys: Vec<f64> = p.iter().map(|x| x[1]).chain([1.0]).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let n = p.n() as f64;
        let mut worst: f64 = 0.0;
        for &bx in &xs {
            for &by in &ys {
                let open = p.iter().filter(|x| x[0] < bx && x[1] < by).count() as f64;
                let closed = p.iter().filter(|x| x[0] <= bx && x[1] <= by).count() as f64;
                let vol = bx * by;
                worst = worst
                    .max((open / n - vol).abs())
                    .max((closed / n - vol).abs());
            }
        }
        worst
    }

    #[test]
    fn sobol_beats_random_discrepancy() {
        let s = spec(256, 2);
        let qmc = star_discrepancy(&sobol(&s, 1).unwrap());
        let mean = (0..20)
            .map(|seed| star_discrepancy(&uniform_random(&s, seed)))
            .sum::<f64>()
            / 20.0;
        assert!(qmc < mean, "{qmc} vs {mean}");
    }

    #[test]
    fn trial_seeds_are_offsets() {
        assert_eq!(trial_seed(10, 3), 13);
        assert_eq!(trial_seed(u64::MAX, 1), 0);
        let cfg = GeneratorConfig::new(Method::Lhs, 4);
        assert_eq!(generate(&spec(5, 2), &cfg).unwrap(), lhs(&spec(5, 2), 4));
        assert_eq!("SOBOL".parse::<Method>().unwrap(), Method::Sobol);
    }

    proptest! {
        #[test]
        fn lhs_stratifies_every_axis(n in 2usize..200, d in 2usize..9, seed in any::<u64>()) {
            let p = lhs(&spec(n, d), seed);
            prop_assert_eq!(p.n(), n);
            for axis in 0..d {
                let mut seen = vec![false; n];
                for x in p.iter() {
                    prop_assert!((0.0..1.0).contains(&x[axis]));
                    let s = (x[axis] * n as f64).floor() as usize;
                    prop_assert!(!seen[s]);
                    seen[s] = true;
                }
            }
        }

        #[test]
        fn generators_emit_n_points_in_cube(n in 2usize..100, d in 2usize..9, seed in any::<u64>()) {
            let s = spec(n, d);
            for m in [Method::Random, Method::Lhs, Method::Sobol] {
                let p = generate(&s, &GeneratorConfig { method: m, seed, skip: 1 + seed % 50 }).unwrap();
                prop_assert_eq!(p.n(), n);
                prop_assert!(p.coords().iter().all(|c| (0.0..1.0).contains(c)));
            }
        }
    }
}
