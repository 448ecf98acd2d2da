//! Adaptive selection of the truncation size.
//!
//! A truncation is accepted when
//!
//! 1. the residual is small, `‖Ac - b‖ ≤ δ‖b‖`, and
//! 2. the fit is good at `Q` random points `tᵢ` of the domain,
//!    `max |f(tᵢ) - f_N(tᵢ)| ≤ δ′‖b‖`,
//! 3. optionally, the coefficients are moderate, `‖c‖ ≤ μ‖b‖`.
//!
//! The conditions are checked in that order and later ones are skipped once
//! one fails. Since `‖b‖` scales with `f`, acceptance is invariant under
//! scaling of the target.
//!
//! Two strategies search for the smallest accepted truncation along a
//! [`TruncationSchedule`]: [`adapt_incremental`] tries every step, and
//! [`adapt_bisection`] doubles the size until a step is accepted and then
//! bisects between the last rejected and the accepted size.

use std::sync::Arc;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approximant::Approximant;
use crate::dictionary::{Descriptor, Dictionary};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::Function;
use crate::sampling::{assemble_system, random_points, LeastSquaresSystem, OversamplingRule, PointKind};
use crate::schedule::{Direction, Step, TruncationSchedule};
use crate::solver::{tsvd_solve, RegularizedSolution};

pub const DEFAULT_TEST_POINTS: usize = 3;
pub const DEFAULT_N_MAX: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingCriterion {
    pub delta: f64,
    pub delta_prime: f64,
    pub epsilon: f64,
    pub test_points: usize,
    pub seed: u64,
    pub n_max: usize,
    pub mu: Option<f64>,
}

impl StoppingCriterion {
    /// `δ′ = δ`, `ε = δ/100`, `Q = 3`, `Nmax = 4096`, no coefficient condition.
    pub fn new(delta: f64) -> Result<Self> {
        let c = Self {
            delta,
            delta_prime: delta,
            epsilon: delta / 100.0,
            test_points: DEFAULT_TEST_POINTS,
            seed: 0,
            n_max: DEFAULT_N_MAX,
            mu: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_delta_prime(mut self, delta_prime: f64) -> Self {
        self.delta_prime = delta_prime;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_test_points(mut self, q: usize) -> Self {
        self.test_points = q;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_mu(mut self, mu: Option<f64>) -> Self {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(self.delta) {
            return bad(format!("delta = {} must lie in (0, 1)", self.delta));
        }
        if !unit(self.delta_prime) {
            return bad(format!("delta' = {} must lie in (0, 1)", self.delta_prime));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1".into());
        }
        if let Some(mu) = self.mu {
            if !(mu.is_finite() && mu > 0.0) {
                return bad(format!("mu = {mu} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub residual_pass: bool,
    /// `None` when skipped because the residual failed.
    pub points_pass: Option<bool>,
    /// `None` when disabled or skipped.
    pub coefficient_pass: Option<bool>,
    pub accepted: bool,
    /// Largest error over the test points, when evaluated.
    pub max_point_error: Option<f64>,
}

/// Draws the `Q` test points of a run.
pub fn draw_test_points(domain: &Domain, criterion: &StoppingCriterion) -> Result<Vec<Vec<f64>>> {
    if criterion.test_points == 0 {
        warn!("stopping criterion uses no random test points; only the residual is checked");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(criterion.seed);
    random_points(domain, criterion.test_points, &mut rng)
}

/// Evaluates the stopping criterion for `solution`, comparing against
/// `reference_b_norm` (usually `‖b‖` of `system`).
pub fn check_criterion(
    solution: &RegularizedSolution,
    target: &Function,
    approximant: &Approximant,
    criterion: &StoppingCriterion,
    test_points: &[Vec<f64>],
    reference_b_norm: f64,
) -> Result<CriterionOutcome> {
    let mut outcome = CriterionOutcome {
        residual_pass: solution.residual_norm <= criterion.delta * reference_b_norm,
        points_pass: None,
        coefficient_pass: None,
        accepted: false,
        max_point_error: None,
    };
    if !outcome.residual_pass {
        return Ok(outcome);
    }
    let mut max_err = 0.0f64;
    for t in test_points {
        let (f, g) = (target.eval(t), approximant.eval(t)?);
        let err = (f - g).norm();
        if !err.is_finite() {
            return Err(Error::NonFinite { point: t.clone(), value: format!("f = {f}, f_N = {g}") });
        }
        max_err = max_err.max(err);
    }
    outcome.max_point_error = Some(max_err);
    let points_pass = max_err <= criterion.delta_prime * reference_b_norm;
    outcome.points_pass = Some(points_pass);
    if !points_pass {
        return Ok(outcome);
    }
    if let Some(mu) = criterion.mu {
        let pass = solution.coefficient_norm <= mu * reference_b_norm;
        outcome.coefficient_pass = Some(pass);
        outcome.accepted = pass;
    } else {
        outcome.accepted = true;
    }
    Ok(outcome)
}

/// A target function together with its dictionary, domain and sampling.
#[derive(Clone, Debug)]
pub struct FrameProblem {
    pub dictionary: Dictionary,
    pub domain: Domain,
    pub target: Function,
    pub rule: OversamplingRule,
    pub point_kind: PointKind,
    pub scheme_seed: u64,
}

impl FrameProblem {
    /// Equispaced sampling with `γ = 2`.
    pub fn new(dictionary: Dictionary, domain: Domain, target: Function) -> Result<Self> {
        if dictionary.dim() != domain.dim() {
            return Err(Error::InvalidDomain(format!(
                "domain has dimension {}, dictionary {}",
                domain.dim(),
                dictionary.dim()
            )));
        }
        Ok(Self {
            dictionary,
            domain,
            target,
            rule: OversamplingRule::default(),
            point_kind: PointKind::Equispaced,
            scheme_seed: 0,
        })
    }

    pub fn with_rule(mut self, rule: OversamplingRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_point_kind(mut self, kind: PointKind, seed: u64) -> Self {
        self.point_kind = kind;
        self.scheme_seed = seed;
        self
    }

    pub fn with_target(mut self, target: Function) -> Self {
        self.target = target;
        self
    }

    pub fn system(&self, desc: &Descriptor) -> Result<LeastSquaresSystem> {
        assemble_system(&self.dictionary, desc, &self.target, self.rule, &self.domain, self.point_kind, self.scheme_seed)
    }

    pub fn solve(&self, desc: &Descriptor, epsilon: f64) -> Result<(LeastSquaresSystem, RegularizedSolution)> {
        let system = self.system(desc)?;
        let solution = tsvd_solve(&system, epsilon)?;
        Ok((system, solution))
    }

    pub fn approximant(&self, desc: &Descriptor, solution: &RegularizedSolution) -> Result<Approximant> {
        Approximant::new(self.dictionary.clone(), desc.clone(), solution.coefficients.clone())
    }
}

/// The result of trying one truncation.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub solution: RegularizedSolution,
    pub b_norm: f64,
    pub outcome: CriterionOutcome,
}

/// Solves and judges one truncation. Implemented by [`FrameEvaluator`];
/// other implementations make the search logic testable on its own.
pub trait StepEvaluator {
    /// Judges `step` against `reference_b_norm`, or against its own `‖b‖`
    /// when `None`.
    fn evaluate(&mut self, step: &Step, reference_b_norm: Option<f64>) -> Result<Evaluation>;
}

/// Evaluates steps of a [`FrameProblem`] with fixed test points.
pub struct FrameEvaluator<'a> {
    problem: &'a FrameProblem,
    criterion: &'a StoppingCriterion,
    test_points: Arc<Vec<Vec<f64>>>,
}

impl<'a> FrameEvaluator<'a> {
    pub fn new(problem: &'a FrameProblem, criterion: &'a StoppingCriterion) -> Result<Self> {
        criterion.validate()?;
        let test_points = Arc::new(draw_test_points(&problem.domain, criterion)?);
        Ok(Self { problem, criterion, test_points })
    }

    pub fn test_points(&self) -> &[Vec<f64>] {
        &self.test_points
    }
}

impl StepEvaluator for FrameEvaluator<'_> {
    fn evaluate(&mut self, step: &Step, reference_b_norm: Option<f64>) -> Result<Evaluation> {
        let (system, solution) = self.problem.solve(&step.descriptor, self.criterion.epsilon)?;
        let b_norm = system.rhs_norm();
        let approximant = self.problem.approximant(&step.descriptor, &solution)?;
        let outcome = check_criterion(
            &solution,
            &self.problem.target,
            &approximant,
            self.criterion,
            &self.test_points,
            reference_b_norm.unwrap_or(b_norm),
        )?;
        Ok(Evaluation { solution, b_norm, outcome })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Incremental,
    Doubling,
    Bisection,
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub phase: Phase,
    pub descriptor: Descriptor,
    pub total: usize,
    pub residual_norm: f64,
    pub coefficient_norm: f64,
    pub b_norm: f64,
    pub reference_b_norm: f64,
    pub outcome: CriterionOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    HitNmax,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::HitNmax => "hitNmax",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveResult {
    pub accepted: Option<Descriptor>,
    /// The solution at the accepted step, or at the last step tried.
    pub solution: RegularizedSolution,
    pub trace: Vec<TraceEntry>,
    pub reference_b_norm: f64,
    pub termination: Termination,
}

impl AdaptiveResult {
    /// Total size of the accepted truncation, if any.
    pub fn accepted_total(&self) -> Option<usize> {
        self.accepted.as_ref().map(Descriptor::total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Incremental,
    Bisection,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Incremental => "incremental",
            Self::Bisection => "bisection",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "incremental" => Ok(Self::Incremental),
            "bisection" => Ok(Self::Bisection),
            other => Err(Error::InvalidParameter(format!("unknown strategy '{other}'"))),
        }
    }
}

fn record(trace: &mut Vec<TraceEntry>, phase: Phase, step: &Step, eval: &Evaluation, reference: f64) {
    trace.push(TraceEntry {
        phase,
        descriptor: step.descriptor.clone(),
        total: step.total(),
        residual_norm: eval.solution.residual_norm,
        coefficient_norm: eval.solution.coefficient_norm,
        b_norm: eval.b_norm,
        reference_b_norm: reference,
        outcome: eval.outcome.clone(),
    });
}

fn first_within(schedule: &TruncationSchedule, n_max: usize) -> Result<Step> {
    let first = schedule.first();
    if first.total() > n_max {
        return Err(Error::NoReachable { target: n_max, direction: "<=" });
    }
    Ok(first)
}

/// Tries every step of `schedule` in order until one is accepted or the
/// total would exceed `n_max`.
pub fn search_incremental<E: StepEvaluator>(
    schedule: &TruncationSchedule,
    n_max: usize,
    evaluator: &mut E,
) -> Result<AdaptiveResult> {
    let mut step = first_within(schedule, n_max)?;
    let mut trace = Vec::new();
    loop {
        let eval = evaluator.evaluate(&step, None)?;
        record(&mut trace, Phase::Incremental, &step, &eval, eval.b_norm);
        let next = schedule.step(step.index + 1);
        if eval.outcome.accepted || next.total() > n_max {
            let termination = if eval.outcome.accepted { Termination::Converged } else { Termination::HitNmax };
            return Ok(AdaptiveResult {
                accepted: eval.outcome.accepted.then(|| step.descriptor.clone()),
                reference_b_norm: eval.b_norm,
                solution: eval.solution,
                trace,
                termination,
            });
        }
        step = next;
    }
}

/// Doubles the total size until a step is accepted, then bisects between
/// the last rejected and the accepted step.
///
/// During doubling each step is judged against its own `‖b‖`; during
/// bisection every step is judged against `‖b‖` of the accepted doubling
/// step `N̂`. The doubling size is clamped to the largest reachable total
/// `≤ n_max`. The returned step is the smallest accepted one found by the
/// bracket, which is the optimum whenever acceptance is monotone in `N`.
pub fn search_bisection<E: StepEvaluator>(
    schedule: &TruncationSchedule,
    n_max: usize,
    evaluator: &mut E,
) -> Result<AdaptiveResult> {
    let mut step = first_within(schedule, n_max)?;
    let mut trace = Vec::new();
    let mut rejected: Option<Step> = None;
    let accepted = loop {
        let eval = evaluator.evaluate(&step, None)?;
        record(&mut trace, Phase::Doubling, &step, &eval, eval.b_norm);
        if eval.outcome.accepted {
            break (step, eval);
        }
        let mut next = schedule.doubled(step.index);
        if next.total() > n_max {
            next = schedule.nearest_reachable(n_max, Direction::Down)?;
        }
        if next.index <= step.index {
            return Ok(AdaptiveResult {
                accepted: None,
                reference_b_norm: eval.b_norm,
                solution: eval.solution,
                trace,
                termination: Termination::HitNmax,
            });
        }
        rejected = Some(step);
        step = next;
    };

    let (mut high, high_eval) = accepted;
    let reference = high_eval.b_norm;
    let mut solution = high_eval.solution;
    if let Some(mut low) = rejected {
        while high.index - low.index > 1 {
            let mid = (low.total() + high.total()) / 2;
            let mut probe = schedule.nearest_reachable(mid, Direction::Down)?;
            if probe.index <= low.index {
                probe = schedule.step(low.index + 1);
            }
            let eval = evaluator.evaluate(&probe, Some(reference))?;
            record(&mut trace, Phase::Bisection, &probe, &eval, reference);
            if eval.outcome.accepted {
                high = probe;
                solution = eval.solution;
            } else {
                low = probe;
            }
        }
    }
    Ok(AdaptiveResult {
        accepted: Some(high.descriptor),
        solution,
        trace,
        reference_b_norm: reference,
        termination: Termination::Converged,
    })
}

/// Smallest accepted truncation, trying every step.
pub fn adapt_incremental(
    problem: &FrameProblem,
    schedule: &TruncationSchedule,
    criterion: &StoppingCriterion,
) -> Result<AdaptiveResult> {
    let mut evaluator = FrameEvaluator::new(problem, criterion)?;
    search_incremental(schedule, criterion.n_max, &mut evaluator)
}

/// Accepted truncation found by doubling and bisection.
pub fn adapt_bisection(
    problem: &FrameProblem,
    schedule: &TruncationSchedule,
    criterion: &StoppingCriterion,
) -> Result<AdaptiveResult> {
    let mut evaluator = FrameEvaluator::new(problem, criterion)?;
    search_bisection(schedule, criterion.n_max, &mut evaluator)
}

pub fn optimal_n(
    problem: &FrameProblem,
    schedule: &TruncationSchedule,
    criterion: &StoppingCriterion,
    strategy: Strategy,
) -> Result<AdaptiveResult> {
    match strategy {
        Strategy::Incremental => adapt_incremental(problem, schedule, criterion),
        Strategy::Bisection => adapt_bisection(problem, schedule, criterion),
    }
}
