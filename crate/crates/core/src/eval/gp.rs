//! Gaussian-process surrogate, expected improvement and sequential sampling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::functions::BenchmarkFunction;
use crate::error::{Error, Result};
use crate::synthesis::PointSet;

/// Largest diagonal jitter tried before giving up on a factorization.
pub const MAX_JITTER: f64 = 1e-3;
pub const DEFAULT_CANDIDATE_POOL: usize = 2048;

/// Squared-exponential kernel `s^2 exp(-|x - y|^2 / (2 l^2))` plus `noise` on
/// the diagonal; zero prior mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpConfig {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            length_scale: 0.2,
            signal_variance: 1.0,
            noise: 1e-6,
        }
    }
}

impl GpConfig {
    fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        self.signal_variance * (-0.5 * s / (self.length_scale * self.length_scale)).exp()
    }
}

#[derive(Clone, Debug)]
pub struct GpModel {
    cfg: GpConfig,
    x: PointSet,
    /// Lower Cholesky factor of `K + jitter I`, row-major.
    chol: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
}

/// In-place lower Cholesky factor; `false` if `a` is not positive definite.
fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if !(diag > 0.0) {
            return false;
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / diag;
        }
        for k in (j + 1)..n {
            a[j * n + k] = 0.0;
        }
    }
    true
}

fn forward(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * n + i];
    }
}

fn backward(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l[k * n + i] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * n + i];
    }
}

/// Posterior given `(train, values)`. The noise term starts at `cfg.noise`
/// and grows tenfold per failed factorization up to `MAX_JITTER`.
pub fn gp_fit(train: &PointSet, values: &[f64], cfg: &GpConfig) -> Result<GpModel> {
    let n = train.n();
    if n == 0 {
        return Err(Error::invalid("GP needs at least one training point"));
    }
    if values.len() != n {
        return Err(Error::invalid(format!(
            "{} training values for {n} points",
            values.len()
        )));
    }
    if !(cfg.length_scale > 0.0 && cfg.signal_variance > 0.0 && cfg.noise >= 0.0) {
        return Err(Error::invalid(
            "GP length scale and variance must be positive, noise non-negative",
        ));
    }
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = cfg.kernel(train.point(i), train.point(j));
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    let mut jitter = cfg.noise;
    loop {
        let mut chol = gram.clone();
        for i in 0..n {
            chol[i * n + i] += jitter;
        }
        if cholesky(&mut chol, n) {
            let mut alpha = values.to_vec();
            forward(&chol, n, &mut alpha);
            backward(&chol, n, &mut alpha);
            return Ok(GpModel {
                cfg: *cfg,
                x: train.clone(),
                chol,
                alpha,
                jitter,
            });
        }
        if jitter >= MAX_JITTER {
            return Err(Error::Numerical(format!(
                "GP covariance not positive definite with jitter {jitter:e}"
            )));
        }
        jitter = if jitter == 0.0 {
            1e-10
        } else {
            (jitter * 10.0).min(MAX_JITTER)
        };
    }
}

impl GpModel {
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Posterior mean and variance (clamped at zero) at `x`.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let n = self.x.n();
        let mut v: Vec<f64> = self.x.iter().map(|t| self.cfg.kernel(x, t)).collect();
        let mean = v.iter().zip(&self.alpha).map(|(k, a)| k * a).sum();
        forward(&self.chol, n, &mut v);
        let var = self.cfg.signal_variance - v.iter().map(|v| v * v).sum::<f64>();
        (mean, var.max(0.0))
    }
}

pub fn gp_predict(model: &GpModel, x: &[f64]) -> (f64, f64) {
    model.predict(x)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Expected improvement below `best` for a Gaussian with mean `mu` and
/// standard deviation `sigma`.
pub fn improvement(mu: f64, sigma: f64, best: f64) -> f64 {
    if !(sigma > 0.0) {
        return (best - mu).max(0.0);
    }
    let z = (best - mu) / sigma;
    ((best - mu) * normal_cdf(z) + sigma * normal_pdf(z)).max(0.0)
}

pub fn expected_improvement(model: &GpModel, x: &[f64], best: f64) -> f64 {
    let (mu, var) = model.predict(x);
    improvement(mu, var.sqrt(), best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesOptConfig {
    pub gp: GpConfig,
    pub candidate_pool: usize,
    pub seed: u64,
}

impl Default for BayesOptConfig {
    fn default() -> Self {
        Self {
            gp: GpConfig::default(),
            candidate_pool: DEFAULT_CANDIDATE_POOL,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesOptRun {
    pub points: PointSet,
    pub values: Vec<f64>,
    /// Best value after the initial design (entry 0) and after each addition.
    pub trace: Vec<f64>,
}

impl BayesOptRun {
    pub fn write_trace<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,best_value")?;
        for (i, b) in self.trace.iter().enumerate() {
            writeln!(out, "{i},{b}")?;
        }
        Ok(())
    }
}

/// Adds `budget` points one at a time, each the EI maximizer (lowest index on
/// ties) over a fresh pool of uniform candidates.
pub fn bayes_opt_run(
    init: &PointSet,
    f: &BenchmarkFunction,
    budget: usize,
    cfg: &BayesOptConfig,
) -> Result<BayesOptRun> {
    if init.n() == 0 {
        return Err(Error::invalid(
            "sequential sampling needs a non-empty initial design",
        ));
    }
    if cfg.candidate_pool == 0 {
        return Err(Error::invalid("candidate pool must be non-empty"));
    }
    let d = init.d();
    let mut points = init.clone();
    let mut values = f.eval_all(init)?;
    let mut best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut trace = vec![best];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool = vec![0.0; cfg.candidate_pool * d];
    for iter in 1..=budget {
        let model = gp_fit(&points, &values, &cfg.gp).map_err(|e| Error::Iteration {
            iteration: iter,
            source: Box::new(e),
        })?;
        pool.iter_mut().for_each(|c| *c = rng.gen());
        let (mut arg, mut top) = (0, f64::NEG_INFINITY);
        for (j, x) in pool.chunks_exact(d).enumerate() {
            let ei = expected_improvement(&model, x, best);
            if ei > top {
                (arg, top) = (j, ei);
            }
        }
        let x = &pool[arg * d..(arg + 1) * d];
        let y = f.eval(x)?;
        points.push(x)?;
        values.push(y);
        best = best.min(y);
        trace.push(best);
    }
    Ok(BayesOptRun {
        points,
        values,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::functions::FunctionKind;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_points(n: usize, d: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::new(d, (0..n * d).map(|_| rng.gen::<f64>()).collect()).unwrap()
    }

    #[test]
    fn interpolates_training_points() {
        let train = random_points(15, 2, 1);
        let values: Vec<f64> = train.iter().map(|x| (3.0 * x[0]).sin() + x[1]).collect();
        let cfg = GpConfig {
            noise: 1e-10,
            ..GpConfig::default()
        };
        let gp = gp_fit(&train, &values, &cfg).unwrap();
        for (x, y) in train.iter().zip(&values) {
            let (m, v) = gp.predict(x);
            assert!((m - y).abs() < 1e-4 && v < 1e-4, "{m} vs {y}, var {v}");
        }
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let train = PointSet::new(2, vec![0.0, 0.0, 0.05, 0.0]).unwrap();
        let gp = gp_fit(&train, &[3.0, 4.0], &GpConfig::default()).unwrap();
        // 10 length scales from both points
        let (m, v) = gp.predict(&[2.0, 0.1]);
        assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12, "{m} {v}");
    }

    #[test]
    fn duplicate_points_escalate_jitter() {
        let train = PointSet::new(2, vec![0.3, 0.3, 0.3, 0.3, 0.3, 0.3]).unwrap();
        let gp = gp_fit(
            &train,
            &[1.0, 1.0, 1.0],
            &GpConfig {
                noise: 0.0,
                ..GpConfig::default()
            },
        )
        .unwrap();
        assert!(gp.jitter() > 0.0 && gp.jitter() <= MAX_JITTER);
    }

    #[test]
    fn improvement_limits() {
        assert_eq!(improvement(1.0, 0.0, 3.0), 2.0);
        assert_eq!(improvement(3.0, 0.0, 3.0), 0.0);
        assert_eq!(improvement(5.0, 0.0, 3.0), 0.0);
        // z = 0: sigma phi(0)
        assert!((improvement(2.0, 0.5, 2.0) - 0.5 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-15);
    }

    #[test]
    fn sequential_run_contract() {
        let f = BenchmarkFunction::new(FunctionKind::Ackley, 2).unwrap();
        let init = random_points(8, 2, 3);
        let cfg = BayesOptConfig {
            candidate_pool: 256,
            seed: 4,
            ..BayesOptConfig::default()
        };
        let none = bayes_opt_run(&init, &f, 0, &cfg).unwrap();
        assert_eq!(none.points, init);
        assert_eq!(none.trace.len(), 1);
        let run = bayes_opt_run(&init, &f, 12, &cfg).unwrap();
        assert_eq!(run.points.n(), 20);
        assert_eq!(run.trace.len(), 13);
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(run, bayes_opt_run(&init, &f, 12, &cfg).unwrap());
        let mut csv = Vec::new();
        run.write_trace(&mut csv).unwrap();
        assert!(csv.starts_with(b"iter,best_value\n0,"));
    }

    proptest! {
        #[test]
        fn variance_and_improvement_non_negative(
            seed in 0u64..1000,
            x in prop::collection::vec(0.0f64..1.0, 3),
            best in -5.0f64..5.0,
        ) {
            let train = random_points(12, 3, seed);
            let values: Vec<f64> = train.iter().map(|p| p.iter().sum()).collect();
            let gp = gp_fit(&train, &values, &GpConfig::default()).unwrap();
            prop_assert!(gp.predict(&x).1 >= 0.0);
            prop_assert!(expected_improvement(&gp, &x, best) >= 0.0);
        }

        #[test]
        fn improvement_never_negative(mu in -1e3f64..1e3, sigma in 0.0f64..1e3, best in -1e3f64..1e3) {
            prop_assert!(improvement(mu, sigma, best) >= 0.0);
        }
    }
}
