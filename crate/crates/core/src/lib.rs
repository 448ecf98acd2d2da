//! Adaptive frame approximation with truncated-SVD least squares.

pub mod adaptive;
pub mod approximant;
pub mod cli;
pub mod diagnostics;
pub mod dictionary;
pub mod domain;
pub mod error;
pub mod function;
pub mod sampling;
pub mod schedule;
pub mod solver;

pub use adaptive::{
    adapt_bisection, adapt_incremental, optimal_n, AdaptiveResult, CriterionOutcome, FrameProblem, StoppingCriterion,
    Strategy, Termination,
};
pub use approximant::Approximant;
pub use dictionary::{Descriptor, Dictionary, ElementIndex, ScalarField, WeightFn};
pub use domain::Domain;
pub use error::{Error, Result};
pub use function::Function;
pub use sampling::{LeastSquaresSystem, OversamplingRule, PointKind, SamplingScheme};
pub use schedule::{Direction, GrowthPolicy, Step, TruncationSchedule};
pub use solver::{tsvd_solve, weighted_solve, DiagonalWeight, RegularizedSolution, Threshold};

// The README and guide code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/least_squares.md")]
    mod least_squares {}
    #[doc = include_str!("../../../book/src/weighting.md")]
    mod weighting {}
    #[doc = include_str!("../../../book/src/adaptive.md")]
    mod adaptive {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
