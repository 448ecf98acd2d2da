//! Error metrics, convergence sweeps, parameter grids and timings, with the
//! CSV writers for each.

use std::io::{self, Write};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::adaptive::{optimal_n, FrameProblem, StoppingCriterion, Strategy, Termination};
use crate::approximant::Approximant;
use crate::domain::{for_each_grid_point, Domain};
use crate::error::{Error, Result};
use crate::function::Function;
use crate::sampling::{generate_scheme, PointKind};
use crate::schedule::{Direction, TruncationSchedule};

/// Oversampling of the reference grid for H-norm errors, relative to the fit.
pub const DEFAULT_FINE_FACTOR: usize = 16;
pub const DEFAULT_UNIFORM_GRID: usize = 2000;

fn pointwise_error(f: &Function, g: &Approximant, x: &[f64]) -> Result<f64> {
    let (fv, gv) = (f.eval(x), g.eval(x)?);
    let err = (fv - gv).norm();
    if err.is_finite() {
        Ok(err)
    } else {
        Err(Error::NonFinite { point: x.to_vec(), value: format!("f = {fv}, f_N = {gv}") })
    }
}

/// Largest `|f(x) - f_N(x)|` over the midpoints of a grid with `grid_size`
/// cells per dimension, restricted to `domain`.
pub fn uniform_error(f: &Function, approximant: &Approximant, domain: &Domain, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!("uniform error grid needs at least 2 points, got {grid_size}")));
    }
    let mut points = Vec::new();
    for_each_grid_point(domain.bounds(), &vec![grid_size; domain.dim()], |x| {
        if domain.contains(x) {
            points.push(x.to_vec());
        }
    });
    points.par_iter().map(|x| pointwise_error(f, approximant, x)).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Discrete `L²(Ω)` error `(Σ |Ω|/M' |f(x) - f_N(x)|²)^{1/2}` on an
/// equispaced grid of `fine_m` points.
pub fn h_norm_error(f: &Function, approximant: &Approximant, domain: &Domain, fine_m: usize) -> Result<f64> {
    let scheme = generate_scheme(domain, fine_m, PointKind::Equispaced, 0)?;
    let points: Vec<(&[f64], f64)> = scheme.points().zip(scheme.weights().iter().copied()).collect();
    let sum = points
        .par_iter()
        .map(|&(x, w)| pointwise_error(f, approximant, x).map(|e| (w * e).powi(2)))
        .try_reduce(|| 0.0, |a, b| Ok(a + b))?;
    Ok(sum.sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub residual_norm: f64,
    pub coefficient_norm: f64,
    pub b_norm: f64,
    pub h_error: f64,
    pub uniform_error: f64,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// The H-norm grid has `fine_factor` times as many points as the fit.
    pub fine_factor: usize,
    /// Cells per dimension of the uniform-error grid.
    pub uniform_grid: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { fine_factor: DEFAULT_FINE_FACTOR, uniform_grid: DEFAULT_UNIFORM_GRID }
    }
}

/// Fits at each requested total size and records residual, coefficient
/// norm and errors. Sizes are snapped down to reachable truncations.
pub fn convergence_sweep(
    problem: &FrameProblem,
    schedule: &TruncationSchedule,
    totals: &[usize],
    epsilon: f64,
    options: SweepOptions,
) -> Result<Vec<ConvergenceRecord>> {
    if totals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("sweep sizes must be strictly increasing".into()));
    }
    totals
        .par_iter()
        .map(|&n| {
            let step = schedule.nearest_reachable(n, Direction::Down)?;
            let (system, solution) = problem.solve(&step.descriptor, epsilon)?;
            let approximant = problem.approximant(&step.descriptor, &solution)?;
            let fine_m = options.fine_factor.max(1) * system.rows();
            Ok(ConvergenceRecord {
                n: step.total(),
                residual_norm: solution.residual_norm,
                coefficient_norm: solution.coefficient_norm,
                b_norm: system.rhs_norm(),
                h_error: h_norm_error(&problem.target, &approximant, &problem.domain, fine_m)?,
                uniform_error: uniform_error(&problem.target, &approximant, &problem.domain, options.uniform_grid)?,
                epsilon,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(records: &[ConvergenceRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "N,residual,coefnorm,h_error,uniform_error")?;
    for r in records {
        writeln!(out, "{},{:e},{:e},{:e},{:e}", r.n, r.residual_norm, r.coefficient_norm, r.h_error, r.uniform_error)?;
    }
    Ok(())
}

pub fn write_coefficients_csv<W: Write>(coefficients: &[Complex64], mut out: W) -> io::Result<()> {
    writeln!(out, "index,real,imaginary,abs")?;
    for (k, c) in coefficients.iter().enumerate() {
        writeln!(out, "{k},{:e},{:e},{:e}", c.re, c.im, c.norm())?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    pub axis1: f64,
    pub axis2: f64,
    /// Accepted total size, or `n_max` when the run hit the cap.
    pub n_opt: usize,
    pub converged: bool,
    pub coefficient_norm: f64,
    pub residual_norm: f64,
    pub b_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterGrid {
    pub axis1_name: String,
    pub axis2_name: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major: `axis1` is the slow index.
    pub cells: Vec<GridCell>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridValue {
    CoefficientNorm,
    Residual,
    RelativeResidual,
}

impl GridValue {
    fn of(self, cell: &GridCell) -> f64 {
        match self {
            Self::CoefficientNorm => cell.coefficient_norm,
            Self::Residual => cell.residual_norm,
            Self::RelativeResidual => cell.residual_norm / cell.b_norm,
        }
    }
}

impl ParameterGrid {
    pub fn cell(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[i * self.axis2.len() + j]
    }

    pub fn write_csv<W: Write>(&self, value: GridValue, mut out: W) -> io::Result<()> {
        writeln!(out, "axis1,axis2,N_opt,value")?;
        for c in &self.cells {
            writeln!(out, "{:e},{:e},{},{:e}", c.axis1, c.axis2, c.n_opt, value.of(c))?;
        }
        Ok(())
    }
}

/// `count` logarithmically spaced values from `lo` to `hi`.
pub fn log_axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count).map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)).collect()
        }
    }
}

/// Runs one adaptive search per cell of `axis1 × axis2`. `setup` builds the
/// problem and criterion of a cell and must fix its seeds.
pub fn parameter_grid_run<F>(
    names: (&str, &str),
    axis1: &[f64],
    axis2: &[f64],
    schedule: &TruncationSchedule,
    strategy: Strategy,
    setup: F,
) -> Result<ParameterGrid>
where
    F: Fn(f64, f64) -> Result<(FrameProblem, StoppingCriterion)> + Sync,
{
    let pairs: Vec<(f64, f64)> = axis1.iter().flat_map(|&a| axis2.iter().map(move |&b| (a, b))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (problem, criterion) = setup(a, b)?;
            let result = optimal_n(&problem, schedule, &criterion, strategy)?;
            let converged = result.termination == Termination::Converged;
            let b_norm = result.trace.last().map_or(result.reference_b_norm, |t| t.b_norm);
            Ok(GridCell {
                axis1: a,
                axis2: b,
                n_opt: result.accepted_total().unwrap_or(criterion.n_max),
                converged,
                coefficient_norm: result.solution.coefficient_norm,
                residual_norm: result.solution.residual_norm,
                b_norm: if converged { result.reference_b_norm } else { b_norm },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParameterGrid {
        axis1_name: names.0.to_string(),
        axis2_name: names.1.to_string(),
        axis1: axis1.to_vec(),
        axis2: axis2.to_vec(),
        cells,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub parameter: f64,
    pub n_incremental: usize,
    pub n_bisection: usize,
    /// Median over repeats of `t_bisection / t_single_solve(N_opt)`.
    pub ratio: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Compares both strategies on each problem of a family. The ratio relates
/// the wall time of a full bisection search to a single solve at the
/// incremental optimum; one warm-up run precedes the `repeats` timed runs.
/// Problems that hit the cap are reported with `N = n_max`.
pub fn timing_comparison(
    family: &[(f64, FrameProblem)],
    schedule: &TruncationSchedule,
    criterion: &StoppingCriterion,
    repeats: usize,
) -> Result<Vec<TimingRow>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("timing needs at least one repeat".into()));
    }
    let mut rows = Vec::with_capacity(family.len());
    for (p, problem) in family {
        let inc = optimal_n(problem, schedule, criterion, Strategy::Incremental)?;
        let bis = optimal_n(problem, schedule, criterion, Strategy::Bisection)?;
        let n_inc = inc.accepted_total().unwrap_or(criterion.n_max);
        let n_bis = bis.accepted_total().unwrap_or(criterion.n_max);
        let opt = schedule.nearest_reachable(n_inc.min(criterion.n_max), Direction::Down)?;
        let mut ratios = Vec::with_capacity(repeats);
        for r in 0..=repeats {
            let t0 = Instant::now();
            optimal_n(problem, schedule, criterion, Strategy::Bisection)?;
            let t_bis = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            problem.solve(&opt.descriptor, criterion.epsilon)?;
            let t_single = t0.elapsed().as_secs_f64();
            if r > 0 {
                ratios.push(t_bis / t_single.max(f64::MIN_POSITIVE));
            }
        }
        rows.push(TimingRow { parameter: *p, n_incremental: n_inc, n_bisection: n_bis, ratio: median(ratios) });
    }
    Ok(rows)
}

pub fn write_timing_csv<W: Write>(rows: &[TimingRow], mut out: W) -> io::Result<()> {
    writeln!(out, "p,N_inc,N_bis,ratio")?;
    for r in rows {
        writeln!(out, "{},{},{},{:e}", r.parameter, r.n_incremental, r.n_bisection, r.ratio)?;
    }
    Ok(())
}
