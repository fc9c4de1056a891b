//! Blind-exploration and sequential-sampling experiments.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::functions::{grid_test_set, BenchmarkFunction, FunctionKind};
use super::gp::{bayes_opt_run, BayesOptConfig, BayesOptRun};
use super::oracle::{fit_predict, mse, OracleConfig};
use crate::baseline::{self, trial_seed};
use crate::design::{
    default_radial_grid, reference_radius, search_design, CoverageReport, DesignSpec, PackingTable,
    SearchOptions,
};
use crate::error::{Error, Result};
use crate::pcf::{target_profile, Family, RadialProfile};
use crate::synthesis::{dart_throwing, synthesize, PointSet, Schedule, SynthesisConfig};

/// Test-grid size used to score recovered functions.
pub const TEST_GRID_TARGET: usize = 10_000;
/// Default dart-throwing radius in reference radii. Random sequential
/// insertion jams near half the densest packing fraction, which in the plane
/// corresponds to about 0.78 reference radii.
pub const DEFAULT_DART_RADIUS_FACTOR: f64 = 0.7;
pub const DEFAULT_DART_FAILURES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignMethod {
    Random,
    Lhs,
    Sobol,
    /// Dart throwing at a fixed radius.
    PdsDart,
    /// Point sets synthesized by GD-ALR against the best step-plus-peak PCF.
    Sfsd,
    /// Point sets synthesized by GD-ALR against the best proposed-family PCF.
    Proposed,
}

impl DesignMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignMethod::Random => "random",
            DesignMethod::Lhs => "lhs",
            DesignMethod::Sobol => "sobol",
            DesignMethod::PdsDart => "pds-dart",
            DesignMethod::Sfsd => "sfsd",
            DesignMethod::Proposed => "proposed",
        }
    }

    fn family(self) -> Option<Family> {
        match self {
            DesignMethod::Sfsd => Some(Family::Sfsd),
            DesignMethod::Proposed => Some(Family::Proposed),
            _ => None,
        }
    }
}

impl std::str::FromStr for DesignMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" => Ok(DesignMethod::Proposed),
            "sfsd" => Ok(DesignMethod::Sfsd),
            "pds-dart" | "pds_dart" | "dart" => Ok(DesignMethod::PdsDart),
            other => other.parse::<baseline::Method>().map(|m| match m {
                baseline::Method::Random => DesignMethod::Random,
                baseline::Method::Lhs => DesignMethod::Lhs,
                baseline::Method::Sobol => DesignMethod::Sobol,
            }),
        }
    }
}

/// A design method bound to a size, with the synthesis target precomputed.
#[derive(Clone, Debug)]
pub struct DesignGenerator {
    method: DesignMethod,
    spec: DesignSpec,
    target: Option<(CoverageReport, RadialProfile)>,
    synthesis: Option<SynthesisConfig>,
    dart_radius: f64,
    dart_failures: usize,
    sobol_skip: u64,
}

impl DesignGenerator {
    pub fn new(method: DesignMethod, spec: DesignSpec, search: &SearchOptions) -> Result<Self> {
        let target = match method.family() {
            Some(family) => {
                let report = search_design(&spec, family, search, &PackingTable::standard())?;
                let profile = target_profile(&report.params, &default_radial_grid(&spec))?;
                Some((report, profile))
            }
            None => None,
        };
        Ok(Self {
            method,
            dart_radius: DEFAULT_DART_RADIUS_FACTOR * reference_radius(&spec),
            dart_failures: DEFAULT_DART_FAILURES,
            spec,
            target,
            synthesis: None,
            sobol_skip: 1,
        })
    }

    /// Uses `cfg` (with the seed replaced per design) for synthesized
    /// methods, resampling the target onto `cfg.grid`.
    pub fn with_synthesis(mut self, cfg: SynthesisConfig) -> Result<Self> {
        if let Some((report, profile)) = &mut self.target {
            *profile = target_profile(&report.params, &cfg.grid)?;
        }
        self.synthesis = Some(cfg);
        Ok(self)
    }

    /// Radius and consecutive-failure budget for dart throwing.
    pub fn with_dart(mut self, radius: f64, failures: usize) -> Self {
        self.dart_radius = radius;
        self.dart_failures = failures;
        self
    }

    /// Leading Sobol points dropped, at least one.
    pub fn with_sobol_skip(mut self, skip: u64) -> Self {
        self.sobol_skip = skip;
        self
    }

    /// Synthesis target, for synthesized methods.
    pub fn target(&self) -> Option<&RadialProfile> {
        self.target.as_ref().map(|(_, t)| t)
    }

    pub fn method(&self) -> DesignMethod {
        self.method
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    /// Coverage report of the synthesis target, for synthesized methods.
    pub fn report(&self) -> Option<&CoverageReport> {
        self.target.as_ref().map(|(r, _)| r)
    }

    /// Synthesis settings used for `seed`.
    pub fn synthesis_config(&self, seed: u64) -> SynthesisConfig {
        match &self.synthesis {
            Some(cfg) => SynthesisConfig {
                seed,
                ..cfg.clone()
            },
            None => SynthesisConfig::new(
                &self.spec,
                default_radial_grid(&self.spec),
                Schedule::Alr,
                seed,
            ),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<PointSet> {
        let spec = &self.spec;
        match (self.method, &self.target) {
            (DesignMethod::Random, _) => Ok(baseline::uniform_random(spec, seed)),
            (DesignMethod::Lhs, _) => Ok(baseline::lhs(spec, seed)),
            (DesignMethod::Sobol, _) => baseline::sobol(spec, self.sobol_skip),
            (DesignMethod::PdsDart, _) => {
                dart_throwing(self.dart_radius, spec, self.dart_failures, seed)
            }
            (_, Some((_, target))) => Ok(synthesize(target, spec, &self.synthesis_config(seed))?.0),
            (_, None) => unreachable!("constructor sets a target for synthesized methods"),
        }
    }
}

/// Per-trial MSEs with their mean and sample standard deviation (zero for a
/// single trial).
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub method: String,
    pub function: FunctionKind,
    pub d: usize,
    pub n: usize,
    pub per_trial: Vec<f64>,
    pub mse_mean: f64,
    pub mse_std: f64,
}

pub const EVAL_CSV_HEADER: &str = "method,function,d,n,trials,mse_mean,mse_std";

impl EvalResult {
    pub fn from_trials(
        method: &str,
        function: FunctionKind,
        d: usize,
        n: usize,
        per_trial: Vec<f64>,
    ) -> Result<Self> {
        if per_trial.is_empty() {
            return Err(Error::invalid("an evaluation needs at least one trial"));
        }
        let t = per_trial.len() as f64;
        let mse_mean = per_trial.iter().sum::<f64>() / t;
        let mse_std = if per_trial.len() > 1 {
            (per_trial
                .iter()
                .map(|v| (v - mse_mean) * (v - mse_mean))
                .sum::<f64>()
                / (t - 1.0))
                .sqrt()
        } else {
            0.0
        };
        Ok(Self {
            method: method.to_string(),
            function,
            d,
            n,
            per_trial,
            mse_mean,
            mse_std,
        })
    }

    pub fn trials(&self) -> usize {
        self.per_trial.len()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.method,
            self.function.as_str(),
            self.d,
            self.n,
            self.trials(),
            self.mse_mean,
            self.mse_std
        )
    }

    pub fn write_csv<W: Write>(results: &[EvalResult], mut out: W) -> std::io::Result<()> {
        writeln!(out, "{EVAL_CSV_HEADER}")?;
        for r in results {
            writeln!(out, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

fn check_dims(generator: &DesignGenerator, f: &BenchmarkFunction, trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("an evaluation needs at least one trial"));
    }
    if generator.spec().d() != f.d() {
        return Err(Error::invalid(format!(
            "design is {}-dimensional, function is {}",
            generator.spec().d(),
            f.d()
        )));
    }
    Ok(())
}

fn in_trial<T>(trial: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Trial {
        trial,
        source: Box::new(e),
    })
}

/// Recovery MSE of `oracle` trained on one design per trial. Trial `i` uses
/// design seed `base_seed + i` and oracle seed `oracle.seed + i`.
pub fn blind_eval(
    generator: &DesignGenerator,
    f: &BenchmarkFunction,
    trials: usize,
    base_seed: u64,
    oracle: &OracleConfig,
) -> Result<EvalResult> {
    check_dims(generator, f, trials)?;
    score_designs(
        generator.method().as_str(),
        &generate_trials(generator, trials, base_seed)?,
        f,
        oracle,
    )
}

/// One design per trial, trial `i` seeded `base_seed + i`.
pub fn generate_trials(
    generator: &DesignGenerator,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<PointSet>> {
    (0..trials)
        .map(|t| in_trial(t, generator.generate(trial_seed(base_seed, t))))
        .collect()
}

fn common_size(designs: &[PointSet], f: &BenchmarkFunction) -> Result<usize> {
    let first = designs
        .first()
        .ok_or_else(|| Error::invalid("an evaluation needs at least one trial"))?;
    if designs.iter().any(|p| p.d() != f.d() || p.n() != first.n()) {
        return Err(Error::invalid(
            "designs must share one size and match the function's dimension",
        ));
    }
    Ok(first.n())
}

/// Blind-exploration score of pre-generated designs, one per trial; trial
/// `i` fits the oracle with seed `oracle.seed + i`.
pub fn score_designs(
    method: &str,
    designs: &[PointSet],
    f: &BenchmarkFunction,
    oracle: &OracleConfig,
) -> Result<EvalResult> {
    let n = common_size(designs, f)?;
    let (test, truth) = grid_test_set(f, TEST_GRID_TARGET)?;
    let mut per_trial = Vec::with_capacity(designs.len());
    for (trial, design) in designs.iter().enumerate() {
        let values = f.eval_all(design)?;
        let cfg = OracleConfig {
            seed: trial_seed(oracle.seed, trial),
            ..*oracle
        };
        let predicted = in_trial(trial, fit_predict(design, &values, &test, &cfg))?;
        per_trial.push(mse(&predicted, &truth));
    }
    EvalResult::from_trials(method, f.kind(), f.d(), n, per_trial)
}

/// Sequential sampling from each trial's initial design: `budget` EI
/// additions, then the oracle is refit on every collected point and scored on
/// the test grid. Trial `i` uses seed `base_seed + i` for the design and the
/// candidate pools.
pub fn sequential_eval(
    generator: &DesignGenerator,
    f: &BenchmarkFunction,
    budget: usize,
    trials: usize,
    base_seed: u64,
    oracle: &OracleConfig,
    bo: &BayesOptConfig,
) -> Result<(EvalResult, Vec<BayesOptRun>)> {
    check_dims(generator, f, trials)?;
    let inits = generate_trials(generator, trials, base_seed)?;
    sequential_from(
        generator.method().as_str(),
        &inits,
        f,
        budget,
        base_seed,
        oracle,
        bo,
    )
}

/// [`sequential_eval`] from pre-generated initial designs; trial `i` draws
/// candidate pools from seed `base_seed + i`.
pub fn sequential_from(
    method: &str,
    inits: &[PointSet],
    f: &BenchmarkFunction,
    budget: usize,
    base_seed: u64,
    oracle: &OracleConfig,
    bo: &BayesOptConfig,
) -> Result<(EvalResult, Vec<BayesOptRun>)> {
    let n = common_size(inits, f)?;
    let (test, truth) = grid_test_set(f, TEST_GRID_TARGET)?;
    let mut per_trial = Vec::with_capacity(inits.len());
    let mut runs = Vec::with_capacity(inits.len());
    for (trial, init) in inits.iter().enumerate() {
        let seed = trial_seed(base_seed, trial);
        let run = in_trial(
            trial,
            bayes_opt_run(init, f, budget, &BayesOptConfig { seed, ..*bo }),
        )?;
        let cfg = OracleConfig {
            seed: trial_seed(oracle.seed, trial),
            ..*oracle
        };
        let predicted = in_trial(trial, fit_predict(&run.points, &run.values, &test, &cfg))?;
        per_trial.push(mse(&predicted, &truth));
        runs.push(run);
    }
    let result = EvalResult::from_trials(method, f.kind(), f.d(), n, per_trial)?;
    Ok((result, runs))
}

/// Number of scores strictly above `tau`.
pub fn precision_metric(scores: &[f64], tau: f64) -> usize {
    scores.iter().filter(|&&s| s > tau).count()
}
