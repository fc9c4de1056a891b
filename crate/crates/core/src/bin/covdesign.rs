//! Command-line front end: coverage design, synthesis, baseline generation,
//! evaluation and coverage tables, all persisted to a workspace.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use covdesign::config::RunConfig;
use covdesign::design::{
    default_spectral_grid, search_design, CoverageReport, DesignSpec, PackingTable,
};
use covdesign::error::{Error, Result};
use covdesign::eval::{
    blind_eval, sequential_eval, BenchmarkFunction, DesignGenerator, DesignMethod, EvalResult,
    FunctionKind, OracleKind,
};
use covdesign::pcf::{target_profile, Family};
use covdesign::spectral::{psd_from_params, report_from_spectrum};
use covdesign::synthesis::{synthesize, PointSet, Schedule, Sidecar, SynthesisTrace};
use covdesign::workspace::{ArtifactKind, Workspace};

#[derive(Parser, Debug)]
#[command(name = "covdesign", version, about = "Coverage-based sample designs")]
struct Cli {
    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Workspace root; defaults to $COVDESIGN_WORKSPACE or ./covdesign-workspace.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search the largest realizable coverage radius for one PCF family.
    Design(DesignArgs),
    /// Synthesize a point set matching a stored coverage report.
    Synthesize(SynthesizeArgs),
    /// Generate a design with any supported method.
    Generate(GenerateArgs),
    /// Score designs by function recovery.
    Eval(EvalArgs),
    /// Tabulate coverage radii across families and dimensions.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "proposed")]
    family: Family,
    /// Peak heights to search, comma separated.
    #[arg(long, value_delimiter = ',')]
    p0: Option<Vec<f64>>,
    /// Also sweep the oscillation tail shape.
    #[arg(long)]
    tail_sweep: bool,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Coverage report written by `design`.
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    schedule: Option<Schedule>,
    /// Artifact name stem.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    method: DesignMethod,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Absolute dart radius (pds-dart).
    #[arg(long)]
    r_min: Option<f64>,
    /// Consecutive rejections before dart throwing gives up.
    #[arg(long)]
    max_failures: Option<usize>,
    /// Synthesis iterations (sfsd, proposed).
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EvalKind {
    Blind,
    Seqopt,
}

impl EvalKind {
    fn as_str(self) -> &'static str {
        match self {
            EvalKind::Blind => "blind",
            EvalKind::Seqopt => "seqopt",
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    kind: EvalKind,
    /// Benchmark functions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "alpine1,ackley")]
    function: Vec<FunctionKind>,
    /// Design methods, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "proposed,random")]
    method: Vec<DesignMethod>,
    /// Design size (blind).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    trials: Option<usize>,
    /// Initial design size (seqopt).
    #[arg(long)]
    init: Option<usize>,
    /// Sequential additions (seqopt).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    oracle: Option<OracleKind>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Coverage table (the only report kind).
    #[arg(long, required = true)]
    coverage: bool,
    #[arg(long)]
    n: usize,
    /// Dimensions: `5`, `2..8`, `2..=8` or `2,3,5`.
    #[arg(long, value_parser = parse_dims)]
    d: DimRange,
    #[arg(long, value_delimiter = ',', default_value = "pds,sfsd,proposed")]
    family: Vec<Family>,
}

#[derive(Clone, Debug)]
struct DimRange(Vec<usize>);

fn parse_dims(s: &str) -> std::result::Result<DimRange, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad dimension '{t}': {e}"))
    };
    let dims = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty dimension range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(num)
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    Ok(DimRange(dims))
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::InfeasibleDesign(_) | Error::PartialDesign { .. } => 3,
        Error::Numerical(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(outputs) => {
            for o in outputs {
                println!("{o}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("covdesign: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    ws: Workspace,
    outputs: Vec<String>,
    seeds: Vec<u64>,
}

impl Ctx {
    fn write(&mut self, kind: ArtifactKind, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let rel = self.ws.write_artifact(kind, name, contents.as_ref())?;
        self.outputs.push(rel);
        Ok(())
    }
}

fn run(cli: Cli) -> Result<Vec<String>> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let ws = Workspace::open(
        cli.workspace
            .clone()
            .unwrap_or_else(Workspace::default_root),
    )?;
    let mut ctx = Ctx {
        cfg,
        ws,
        outputs: Vec::new(),
        seeds: Vec::new(),
    };
    match cli.command {
        Command::Design(a) => cmd_design(&mut ctx, a)?,
        Command::Synthesize(a) => cmd_synthesize(&mut ctx, a)?,
        Command::Generate(a) => cmd_generate(&mut ctx, a)?,
        Command::Eval(a) => cmd_eval(&mut ctx, a)?,
        Command::Report(a) => cmd_report(&mut ctx, a)?,
    }
    let command: Vec<String> = std::env::args().collect();
    ctx.ws
        .record_run(command, ctx.seeds.clone(), ctx.outputs.clone())?;
    Ok(ctx.outputs)
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn cmd_design(ctx: &mut Ctx, a: DesignArgs) -> Result<()> {
    let spec = DesignSpec::new(a.n, a.d)?;
    if let Some(p0) = a.p0 {
        ctx.cfg.design.p0_grid = p0;
    }
    if let Some(m) = a.max_iters {
        ctx.cfg.design.max_iters = m;
    }
    ctx.cfg.design.tail_sweep |= a.tail_sweep;
    let report = search_design(
        &spec,
        a.family,
        &ctx.cfg.search_options(),
        &PackingTable::standard(),
    )?;
    let stem = format!("{}-n{}-d{}", a.family, a.n, a.d);
    let pcf = target_profile(&report.params, &ctx.cfg.radial_grid(&spec)?)?;
    let psd = psd_from_params(&report.params, a.n, a.d, &default_spectral_grid(&spec))?;
    let realizability = report_from_spectrum(&psd);
    ctx.write(
        ArtifactKind::Report,
        &format!("{stem}.toml"),
        report.to_toml(),
    )?;
    ctx.write(
        ArtifactKind::Profile,
        &format!("{stem}-pcf.csv"),
        to_bytes(|b| pcf.write_csv(b))?,
    )?;
    ctx.write(
        ArtifactKind::Profile,
        &format!("{stem}-psd.csv"),
        to_bytes(|b| psd.write_csv(b))?,
    )?;
    let text = toml::to_string(&realizability).expect("realizability fields are representable");
    ctx.write(
        ArtifactKind::Report,
        &format!("{stem}-realizability.toml"),
        text,
    )?;
    Ok(())
}

fn trace_csv(trace: &SynthesisTrace) -> String {
    let mut s = String::from("iter,objective,coverage_residual\n");
    s.push_str(&format!(
        "0,{},{}\n",
        trace.initial_objective, trace.initial_coverage_residual
    ));
    for (t, (o, c)) in trace
        .objective
        .iter()
        .zip(&trace.coverage_residual)
        .enumerate()
    {
        s.push_str(&format!("{},{o},{c}\n", t + 1));
    }
    s
}

fn write_design(
    ctx: &mut Ctx,
    stem: &str,
    points: &PointSet,
    trace: Option<&SynthesisTrace>,
) -> Result<()> {
    ctx.write(
        ArtifactKind::Design,
        &format!("{stem}.csv"),
        to_bytes(|b| points.write_csv(b))?,
    )?;
    let sidecar = Sidecar::describe(points, trace.map(SynthesisTrace::final_objective));
    ctx.write(
        ArtifactKind::Design,
        &format!("{stem}.toml"),
        sidecar.to_toml(),
    )?;
    if let Some(t) = trace {
        ctx.write(
            ArtifactKind::Profile,
            &format!("{stem}-trace.csv"),
            trace_csv(t),
        )?;
    }
    Ok(())
}

fn read_report(path: &Path) -> Result<CoverageReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.into(),
        message: e.to_string(),
    })?;
    CoverageReport::from_toml(&text).map_err(|e| Error::Parse {
        path: path.into(),
        message: e.to_string(),
    })
}

fn cmd_synthesize(ctx: &mut Ctx, a: SynthesizeArgs) -> Result<()> {
    let report = read_report(&a.params)?;
    let spec = report.spec()?;
    if let Some(t) = a.iters {
        ctx.cfg.synthesis.t_max = t;
    }
    if let Some(s) = a.schedule {
        ctx.cfg.synthesis.schedule = s;
    }
    let seed = ctx.cfg.seed;
    let scfg = ctx.cfg.synthesis_config(&spec, seed)?;
    let target = target_profile(&report.params, &scfg.grid)?;
    let (points, trace) = synthesize(&target, &spec, &scfg)?;
    let stem = a.name.unwrap_or_else(|| {
        format!(
            "synth-{}-n{}-d{}-{}-s{seed}",
            report.params.family,
            spec.n(),
            spec.d(),
            scfg.schedule.as_str()
        )
    });
    ctx.seeds.push(seed);
    write_design(ctx, &stem, &points, Some(&trace))
}

fn generator(ctx: &RunConfig, method: DesignMethod, spec: &DesignSpec) -> Result<DesignGenerator> {
    let g = DesignGenerator::new(method, spec.clone(), &ctx.search_options())?
        .with_sobol_skip(ctx.generate.sobol_skip)
        .with_dart(
            ctx.generate.dart_radius_factor * covdesign::design::reference_radius(spec),
            ctx.generate.dart_failures,
        );
    match g.target() {
        Some(_) => g.with_synthesis(ctx.synthesis_config(spec, ctx.seed)?),
        None => Ok(g),
    }
}

fn cmd_generate(ctx: &mut Ctx, a: GenerateArgs) -> Result<()> {
    let spec = DesignSpec::new(a.n, a.d)?;
    if let Some(t) = a.iters {
        ctx.cfg.synthesis.t_max = t;
    }
    if let Some(f) = a.max_failures {
        ctx.cfg.generate.dart_failures = f;
    }
    let mut g = generator(&ctx.cfg, a.method, &spec)?;
    if let Some(r) = a.r_min {
        g = g.with_dart(r, ctx.cfg.generate.dart_failures);
    }
    let seed = ctx.cfg.seed;
    let (points, trace) = match g.target() {
        Some(target) => {
            let (p, t) = synthesize(target, &spec, &g.synthesis_config(seed))?;
            (p, Some(t))
        }
        None => (g.generate(seed)?, None),
    };
    let stem = a
        .name
        .unwrap_or_else(|| format!("{}-n{}-d{}-s{seed}", a.method.as_str(), a.n, a.d));
    ctx.seeds.push(seed);
    write_design(ctx, &stem, &points, trace.as_ref())
}

fn cmd_eval(ctx: &mut Ctx, a: EvalArgs) -> Result<()> {
    if let Some(t) = a.trials {
        ctx.cfg.eval.trials = t;
    }
    if let Some(o) = a.oracle {
        ctx.cfg.eval.oracle = o;
    }
    if let Some(i) = a.init {
        ctx.cfg.eval.init = i;
    }
    if let Some(b) = a.budget {
        ctx.cfg.eval.budget = b;
    }
    let trials = ctx.cfg.eval.trials;
    if trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let n = match (a.kind, a.n) {
        (EvalKind::Blind, Some(n)) => n,
        (EvalKind::Blind, None) => {
            return Err(Error::InvalidArgument("blind evaluation needs --n".into()))
        }
        (EvalKind::Seqopt, _) => ctx.cfg.eval.init,
    };
    let spec = DesignSpec::new(n, a.d)?;
    let seed = ctx.cfg.seed;
    let oracle = ctx.cfg.oracle(seed);
    let bo = ctx.cfg.bayes_opt(seed);
    let kind = a.kind.as_str();
    let mut results = Vec::new();
    for &method in &a.method {
        let g = generator(&ctx.cfg, method, &spec)?;
        for &fk in &a.function {
            let f = BenchmarkFunction::new(fk, a.d)?;
            let tag = format!("{kind}-{}-{}-n{n}-d{}", method.as_str(), fk.as_str(), a.d);
            let result = match a.kind {
                EvalKind::Blind => blind_eval(&g, &f, trials, seed, &oracle)?,
                EvalKind::Seqopt => {
                    let (r, runs) =
                        sequential_eval(&g, &f, ctx.cfg.eval.budget, trials, seed, &oracle, &bo)?;
                    for (i, run) in runs.iter().enumerate() {
                        let csv = to_bytes(|b| run.write_trace(b))?;
                        ctx.write(
                            ArtifactKind::Report,
                            &format!("eval-{tag}-trace{i}.csv"),
                            csv,
                        )?;
                    }
                    r
                }
            };
            let mut per_trial = String::from("trial,seed,mse\n");
            for (i, m) in result.per_trial.iter().enumerate() {
                per_trial.push_str(&format!(
                    "{i},{},{m}\n",
                    covdesign::baseline::trial_seed(seed, i)
                ));
            }
            ctx.write(
                ArtifactKind::Report,
                &format!("eval-{tag}-trials.csv"),
                per_trial,
            )?;
            results.push(result);
        }
    }
    let csv = to_bytes(|b| EvalResult::write_csv(&results, b))?;
    ctx.write(
        ArtifactKind::Report,
        &format!("eval-{kind}-n{n}-d{}.csv", a.d),
        csv,
    )?;
    ctx.seeds
        .extend((0..trials).map(|i| covdesign::baseline::trial_seed(seed, i)));
    Ok(())
}

fn cmd_report(ctx: &mut Ctx, a: ReportArgs) -> Result<()> {
    debug_assert!(a.coverage);
    let dims = &a.d.0;
    let specs = dims
        .iter()
        .map(|&d| DesignSpec::new(a.n, d))
        .collect::<Result<Vec<_>>>()?;
    let opts = ctx.cfg.search_options();
    let mut csv = String::from("family,d,n,r_min,rho,feasible\n");
    for spec in &specs {
        for &family in &a.family {
            match search_design(spec, family, &opts, &PackingTable::standard()) {
                Ok(r) => csv.push_str(&format!(
                    "{family},{},{},{},{},{}\n",
                    spec.d(),
                    spec.n(),
                    r.params.r_min,
                    r.rho,
                    r.feasible
                )),
                Err(Error::InfeasibleDesign(_)) => {
                    csv.push_str(&format!("{family},{},{},,,false\n", spec.d(), spec.n()))
                }
                Err(e) => return Err(e),
            }
        }
    }
    let (lo, hi) = (dims.iter().min().unwrap(), dims.iter().max().unwrap());
    ctx.write(
        ArtifactKind::Report,
        &format!("coverage-n{}-d{lo}-{hi}.csv", a.n),
        csv,
    )
}
