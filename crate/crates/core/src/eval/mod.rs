//! Benchmark functions, regression oracles, sequential sampling and the
//! experiment drivers that score designs by function recovery.

pub mod experiment;
pub mod functions;
pub mod gp;
pub mod oracle;

pub use experiment::{
    blind_eval, generate_trials, precision_metric, score_designs, sequential_eval, sequential_from,
    DesignGenerator, DesignMethod, EvalResult, DEFAULT_DART_FAILURES, DEFAULT_DART_RADIUS_FACTOR,
    EVAL_CSV_HEADER, TEST_GRID_TARGET,
};
pub use functions::{grid_test_set, points_per_axis, BenchmarkFunction, FunctionKind};
pub use gp::{
    bayes_opt_run, expected_improvement, gp_fit, gp_predict, improvement, BayesOptConfig,
    BayesOptRun, GpConfig, GpModel, DEFAULT_CANDIDATE_POOL,
};
pub use oracle::{fit_predict, mse, OracleConfig, OracleKind};
