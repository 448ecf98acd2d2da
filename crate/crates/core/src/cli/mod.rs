//! The `framefit` command line.
//!
//! Exit codes: 0 on success (including runs that hit `Nmax`), 1 on I/O
//! failure, 2 on configuration errors and 3 on numerical failures.

pub mod config;
mod figures;
pub mod plot;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::adaptive::{optimal_n, AdaptiveResult, FrameProblem, Phase};
use crate::approximant::Approximant;
use crate::diagnostics::{self, ConvergenceRecord, GridValue, ParameterGrid, SweepOptions};
use crate::domain::for_each_grid_point;
use crate::error::Error;
use crate::schedule::{Direction, TruncationSchedule};
use crate::solver::{self, DiagonalWeight, RegularizedSolution};
use config::{ConfigError, ExperimentConfig, RawConfig, Source, WeightKind};
use plot::Series;

#[derive(Parser, Debug)]
#[command(name = "framefit", version, about = "Adaptive frame approximation with truncated SVD")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Config file with one `key = value` per line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit at a fixed size `approximate.n`.
    Approximate(Common),
    /// Search for the smallest accepted size.
    Adapt(Common),
    /// Record residual, coefficient norm and errors over `sweep.n`.
    Sweep(Common),
    /// Run the adaptive search over a two-parameter grid.
    Grid(Common),
    /// Reproduce the data behind one of the figures fig1 … fig9.
    Figure {
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Numerical(Error),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "config error: {e}"),
            Self::Numerical(e) => write!(f, "numerical failure: {e}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Numerical(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("framefit: {f}");
            f.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Approximate(c) => {
            let ctx = Context::load(&c, &[])?;
            cmd_approximate(&ctx)
        }
        Command::Adapt(c) => cmd_adapt(&Context::load(&c, &[])?),
        Command::Sweep(c) => cmd_sweep(&Context::load(&c, &[])?),
        Command::Grid(c) => cmd_grid(&Context::load(&c, &[])?),
        Command::Figure { id, common } => figures::run(&id, &common),
    }
}

/// A loaded configuration and its output directory.
pub(crate) struct Context {
    pub raw: RawConfig,
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
}

impl Context {
    pub fn load(common: &Common, preset: &[(&str, &str)]) -> CliResult<Self> {
        let mut raw = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Failure::Config(ConfigError { source: None, message: format!("cannot read {}: {e}", path.display()) })
                })?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        for s in &common.set {
            raw.set(s)?;
        }
        if common.plot {
            raw.insert("output.plot", "true", Source::Override("--plot".into()))?;
        }
        if let Some(out) = &common.out {
            raw.insert("output.dir", &out.to_string_lossy(), Source::Override("--out".into()))?;
        }
        let raw = raw.with_defaults_from(preset);
        let cfg = ExperimentConfig::from_raw(&raw)?;
        let out = PathBuf::from(&cfg.output_dir);
        fs::create_dir_all(&out)?;
        let text = cfg.serialize();
        fs::write(out.join("config.txt"), &text)?;
        println!("# effective config");
        for line in text.lines() {
            println!("# {line}");
        }
        Ok(Self { raw, cfg, out })
    }

    pub fn with_out(&self, sub: &str) -> CliResult<Self> {
        let out = self.out.join(sub);
        fs::create_dir_all(&out)?;
        Ok(Self { raw: self.raw.clone(), cfg: self.cfg.clone(), out })
    }

    pub fn problem(&self) -> CliResult<FrameProblem> {
        problem_for(&self.cfg)
    }

    pub fn create(&self, name: &str) -> CliResult<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub(crate) fn problem_for(cfg: &ExperimentConfig) -> CliResult<FrameProblem> {
    Ok(FrameProblem::new(cfg.dictionary()?, cfg.domain()?, cfg.function())?
        .with_rule(cfg.rule())
        .with_point_kind(cfg.point_kind, cfg.scheme_seed))
}

fn fmt_g(x: f64) -> String {
    format!("{x:.6e}")
}

/// Fits at total size `n` with the configured solver weighting.
pub(crate) fn fit(
    problem: &FrameProblem,
    schedule: &TruncationSchedule,
    n: usize,
    epsilon: f64,
    weight: WeightKind,
    alpha: f64,
) -> CliResult<(Approximant, RegularizedSolution, f64)> {
    let step = schedule.nearest_reachable(n, Direction::Down)?;
    let desc = step.descriptor;
    let system = problem.system(&desc)?;
    let solution = match weight {
        WeightKind::None => solver::tsvd_solve(&system, epsilon)?,
        WeightKind::Cubic => {
            let d = DiagonalWeight::cubic_decay(&problem.dictionary.degrees(&desc)?);
            solver::weighted_solve(&system, &d, epsilon)?
        }
        WeightKind::Algebraic => solver::weighted_solve(&system, &solver::algebraic_weight(desc.total(), alpha)?, epsilon)?,
        WeightKind::Incremental => solver::incremental_weighted_solve_nested(&system, epsilon)?,
    };
    let approximant = problem.approximant(&desc, &solution)?;
    Ok((approximant, solution, system.rhs_norm()))
}

/// Writes `f`, `f_N` and the error on a grid over `bounds`; returns the rows.
pub(crate) fn write_evaluation(
    out: &mut impl Write,
    problem: &FrameProblem,
    approximant: &Approximant,
    bounds: &[(f64, f64)],
    per_dim: usize,
) -> CliResult<Vec<(Vec<f64>, f64, f64, bool)>> {
    let dim = bounds.len();
    let names: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    writeln!(out, "{},f,f_N,abs_error,in_domain", names.join(","))?;
    let mut points = Vec::new();
    for_each_grid_point(bounds, &vec![per_dim; dim], |x| points.push(x.to_vec()));
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        let (f, g) = (problem.target.eval(&x), approximant.eval(&x)?);
        let inside = problem.domain.contains(&x);
        let coords: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{},{},{:e},{}", coords.join(","), f.re, g.re, (f - g).norm(), inside as u8)?;
        rows.push((x, f.re, g.re, inside));
    }
    Ok(rows)
}

fn coefficient_series(label: &str, c: &[Complex64]) -> Series {
    Series { label: label.into(), points: c.iter().enumerate().map(|(k, v)| (k as f64, v.norm())).collect() }
}

pub(crate) fn write_coefficients(ctx: &Context, name: &str, c: &[Complex64]) -> CliResult<()> {
    diagnostics::write_coefficients_csv(c, ctx.create(&format!("{name}.csv"))?)?;
    if ctx.cfg.plot {
        plot::line_plot(&ctx.path(&format!("{name}.svg")), name, "k", "|c_k|", &[coefficient_series(name, c)], true)?;
    }
    Ok(())
}

pub(crate) fn approximate_and_report(ctx: &Context, label: &str, bounds_for_plot: &[(f64, f64)]) -> CliResult<String> {
    let cfg = &ctx.cfg;
    let problem = ctx.problem()?;
    let schedule = TruncationSchedule::natural(problem.dictionary.clone());
    let n = cfg.approximate_n(&ctx.raw)?;
    let (approximant, solution, b_norm) =
        fit(&problem, &schedule, n, cfg.criterion.epsilon, cfg.solver_weight, cfg.alpha)?;
    let prefix = if label.is_empty() { String::new() } else { format!("{label}_") };
    write_coefficients(ctx, &format!("{prefix}coefficients"), &solution.coefficients)?;
    let per_dim = if bounds_for_plot.len() == 1 { 1000 } else { 101 };
    let rows = write_evaluation(
        &mut ctx.create(&format!("{prefix}evaluation.csv"))?,
        &problem,
        &approximant,
        bounds_for_plot,
        per_dim,
    )?;
    let fine = diagnostics::DEFAULT_FINE_FACTOR * cfg.rule().samples(approximant.descriptor().total());
    let uniform = diagnostics::uniform_error(&problem.target, &approximant, &problem.domain, per_dim.max(200))?;
    let h = diagnostics::h_norm_error(&problem.target, &approximant, &problem.domain, fine)?;
    if cfg.plot && bounds_for_plot.len() == 1 {
        let f = Series { label: "f".into(), points: rows.iter().map(|r| (r.0[0], r.1)).collect() };
        let g = Series { label: "f_N".into(), points: rows.iter().map(|r| (r.0[0], r.2)).collect() };
        plot::line_plot(&ctx.path(&format!("{prefix}evaluation.svg")), "approximation", "x", "value", &[f, g], false)?;
        let e = Series {
            label: "|f - f_N| on the domain".into(),
            points: rows.iter().filter(|r| r.3).map(|r| (r.0[0], (r.1 - r.2).abs())).collect(),
        };
        plot::line_plot(&ctx.path(&format!("{prefix}error.svg")), "pointwise error", "x", "error", &[e], true)?;
    }
    Ok(format!(
        "N={} residual={} relative_residual={} coefnorm={} rank={} uniform_error={} h_error={}",
        approximant.descriptor().total(),
        fmt_g(solution.residual_norm),
        fmt_g(solution.residual_norm / b_norm.max(f64::MIN_POSITIVE)),
        fmt_g(solution.coefficient_norm),
        solution.retained_rank,
        fmt_g(uniform),
        fmt_g(h)
    ))
}

fn cmd_approximate(ctx: &Context) -> CliResult<()> {
    let domain = ctx.cfg.domain()?;
    let summary = approximate_and_report(ctx, "", domain.bounds())?;
    println!("{summary}");
    Ok(())
}

pub(crate) fn write_trace(out: &mut impl Write, result: &AdaptiveResult) -> io::Result<()> {
    writeln!(out, "phase,N,descriptor,residual,coefnorm,b_norm,reference_b_norm,residual_pass,points_pass,accepted")?;
    for t in &result.trace {
        let phase = match t.phase {
            Phase::Incremental => "incremental",
            Phase::Doubling => "doubling",
            Phase::Bisection => "bisection",
        };
        let points = t.outcome.points_pass.map_or("skipped".to_string(), |b| b.to_string());
        writeln!(
            out,
            "{phase},{},\"{}\",{:e},{:e},{:e},{:e},{},{points},{}",
            t.total, t.descriptor, t.residual_norm, t.coefficient_norm, t.b_norm, t.reference_b_norm,
            t.outcome.residual_pass, t.outcome.accepted
        )?;
    }
    Ok(())
}

pub(crate) fn summary_line(result: &AdaptiveResult, n_max: usize) -> String {
    format!(
        "N_opt={} residual={} coefnorm={} terminated={}",
        result.accepted_total().unwrap_or(n_max),
        fmt_g(result.solution.residual_norm),
        fmt_g(result.solution.coefficient_norm),
        result.termination.name()
    )
}

pub(crate) fn adapt_and_report(ctx: &Context, label: &str) -> CliResult<(AdaptiveResult, FrameProblem)> {
    let cfg = &ctx.cfg;
    let problem = ctx.problem()?;
    let schedule = TruncationSchedule::natural(problem.dictionary.clone());
    let result = optimal_n(&problem, &schedule, &cfg.criterion, cfg.strategy)?;
    let prefix = if label.is_empty() { String::new() } else { format!("{label}_") };
    write_trace(&mut ctx.create(&format!("{prefix}trace.csv"))?, &result)?;
    write_coefficients(ctx, &format!("{prefix}coefficients"), &result.solution.coefficients)?;
    if cfg.plot {
        let rel = Series {
            label: "residual / reference ||b||".into(),
            points: result.trace.iter().map(|t| (t.total as f64, t.residual_norm / t.reference_b_norm)).collect(),
        };
        let delta = Series {
            label: "delta".into(),
            points: result.trace.iter().map(|t| (t.total as f64, cfg.criterion.delta)).collect(),
        };
        plot::line_plot(&ctx.path(&format!("{prefix}trace.svg")), "adaptive search", "N", "relative residual", &[rel, delta], true)?;
    }
    Ok((result, problem))
}

fn cmd_adapt(ctx: &Context) -> CliResult<()> {
    let (result, _) = adapt_and_report(ctx, "")?;
    println!("{}", summary_line(&result, ctx.cfg.criterion.n_max));
    Ok(())
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:e}").replace('-', "m")
}

pub(crate) fn sweep_and_report(ctx: &Context, name: &str) -> CliResult<Vec<(f64, Vec<ConvergenceRecord>)>> {
    let cfg = &ctx.cfg;
    let problem = ctx.problem()?;
    let schedule = TruncationSchedule::natural(problem.dictionary.clone());
    let mut all = Vec::new();
    for &eps in &cfg.sweep_epsilon {
        let records = diagnostics::convergence_sweep(&problem, &schedule, &cfg.sweep_n, eps, SweepOptions::default())?;
        let file = if cfg.sweep_epsilon.len() == 1 { name.to_string() } else { format!("{name}_eps{}", eps_tag(eps)) };
        diagnostics::write_sweep_csv(&records, ctx.create(&format!("{file}.csv"))?)?;
        if cfg.plot {
            let pick = |label: &str, f: &dyn Fn(&ConvergenceRecord) -> f64| Series {
                label: label.into(),
                points: records.iter().map(|r| (r.n as f64, f(r))).collect(),
            };
            let series = [
                pick("H-norm error", &|r| r.h_error),
                pick("residual", &|r| r.residual_norm),
                pick("coefficient norm", &|r| r.coefficient_norm),
                pick("epsilon", &|_| eps),
            ];
            plot::line_plot(&ctx.path(&format!("{file}.svg")), &format!("epsilon = {eps:e}"), "N", "", &series, true)?;
        }
        let last = records.last().expect("sweep sizes are nonempty");
        println!(
            "epsilon={eps:e} N={} residual={} coefnorm={} h_error={} uniform_error={}",
            last.n,
            fmt_g(last.residual_norm),
            fmt_g(last.coefficient_norm),
            fmt_g(last.h_error),
            fmt_g(last.uniform_error)
        );
        all.push((eps, records));
    }
    Ok(all)
}

fn cmd_sweep(ctx: &Context) -> CliResult<()> {
    sweep_and_report(ctx, "sweep").map(|_| ())
}

/// Runs the configured grid; each cell rebuilds the config with its two
/// axis values so derived defaults follow them.
pub(crate) fn grid_and_report(ctx: &Context, name: &str) -> CliResult<ParameterGrid> {
    let cfg = &ctx.cfg;
    let cell_config = |a: f64, b: f64| -> std::result::Result<ExperimentConfig, ConfigError> {
        let mut raw = ctx.raw.clone();
        raw.insert(&cfg.grid_axis1, &format!("{a:e}"), Source::Override(format!("{}={a:e}", cfg.grid_axis1)))?;
        raw.insert(&cfg.grid_axis2, &format!("{b:e}"), Source::Override(format!("{}={b:e}", cfg.grid_axis2)))?;
        ExperimentConfig::from_raw(&raw)
    };
    for &a in &cfg.grid_axis1_values {
        for &b in &cfg.grid_axis2_values {
            cell_config(a, b)?;
        }
    }
    let schedule = TruncationSchedule::natural(cfg.dictionary()?);
    let grid = diagnostics::parameter_grid_run(
        (&cfg.grid_axis1, &cfg.grid_axis2),
        &cfg.grid_axis1_values,
        &cfg.grid_axis2_values,
        &schedule,
        cfg.strategy,
        |a, b| {
            let c = cell_config(a, b).expect("cells validated above");
            let problem = problem_for(&c).map_err(|f| match f {
                Failure::Numerical(e) => e,
                other => Error::InvalidParameter(other.to_string()),
            })?;
            Ok((problem, c.criterion))
        },
    )?;
    for (value, suffix) in [(GridValue::CoefficientNorm, "coefnorm"), (GridValue::Residual, "residual")] {
        grid.write_csv(value, ctx.create(&format!("{name}_{suffix}.csv"))?)?;
    }
    if cfg.plot {
        let table = |f: &dyn Fn(&diagnostics::GridCell) -> f64| -> Vec<Vec<f64>> {
            (0..grid.axis1.len()).map(|i| (0..grid.axis2.len()).map(|j| f(grid.cell(i, j))).collect()).collect()
        };
        plot::heatmap(&ctx.path(&format!("{name}_N.svg")), "log10 N", &grid.axis1, &grid.axis2, &table(&|c| (c.n_opt as f64).log10()))?;
        plot::heatmap(
            &ctx.path(&format!("{name}_coefnorm.svg")),
            "log10 coefficient norm",
            &grid.axis1,
            &grid.axis2,
            &table(&|c| c.coefficient_norm.log10()),
        )?;
    }
    let converged = grid.cells.iter().filter(|c| c.converged).count();
    println!("cells={} converged={converged} axis1={} axis2={}", grid.cells.len(), grid.axis1_name, grid.axis2_name);
    Ok(grid)
}

fn cmd_grid(ctx: &Context) -> CliResult<()> {
    grid_and_report(ctx, "grid").map(|_| ())
}
