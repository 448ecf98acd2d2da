//! Truncation schedules: how a structured truncation grows with a step index.
//!
//! Every schedule is driven by a step counter `j = 1, 2, …`. A base
//! dictionary maps counter `j` to `j` elements. A concatenation or tensor
//! product hands its counter out to its children round robin, starting from
//! one step each, so the counters of a two-part concatenation at step `j` are
//! `1 + ⌈(j-1)/2⌉` and `1 + ⌊(j-1)/2⌋`. Each step grows exactly one leaf by one
//! element, which makes the total size strictly increasing in `j`.

use crate::dictionary::{Descriptor, Dictionary};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthPolicy {
    /// `N = 1, 2, 3, …` for a single (possibly weighted) base dictionary.
    FlatUnitStep,
    /// Alternate the growth of the parts of a concatenation.
    AlternateSplit,
    /// Alternate the growth of the factors of a tensor product, keeping the
    /// per-dimension sizes within one of each other.
    TensorBalanced,
}

impl GrowthPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::FlatUnitStep => "flat-unit-step",
            Self::AlternateSplit => "alternate-split",
            Self::TensorBalanced => "tensor-balanced",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// One reachable truncation of a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub index: usize,
    pub descriptor: Descriptor,
}

impl Step {
    pub fn total(&self) -> usize {
        self.descriptor.total()
    }
}

#[derive(Clone, Debug)]
pub struct TruncationSchedule {
    dictionary: Dictionary,
    policy: GrowthPolicy,
    max_total: Option<usize>,
}

fn strip_weights(d: &Dictionary) -> &Dictionary {
    match d {
        Dictionary::Weighted { inner, .. } => strip_weights(inner),
        other => other,
    }
}

impl TruncationSchedule {
    pub fn new(dictionary: Dictionary, policy: GrowthPolicy) -> Result<Self> {
        let top = strip_weights(&dictionary);
        let reason = match (policy, top) {
            (GrowthPolicy::FlatUnitStep, Dictionary::Fourier { .. } | Dictionary::Chebyshev { .. }) => None,
            (GrowthPolicy::FlatUnitStep, _) => Some("flat growth needs a single base dictionary"),
            (GrowthPolicy::AlternateSplit, Dictionary::Concatenation(_)) => None,
            (GrowthPolicy::AlternateSplit, _) => Some("alternating growth needs a concatenation"),
            (GrowthPolicy::TensorBalanced, Dictionary::TensorProduct(_)) => None,
            (GrowthPolicy::TensorBalanced, _) => Some("balanced growth needs a tensor product"),
        };
        if let Some(reason) = reason {
            return Err(Error::IncompatiblePolicy { policy: policy.name(), reason: reason.into() });
        }
        Ok(Self { dictionary, policy, max_total: None })
    }

    /// Picks the natural policy for the top-level shape of `dictionary`.
    pub fn natural(dictionary: Dictionary) -> Self {
        let policy = match strip_weights(&dictionary) {
            Dictionary::Concatenation(_) => GrowthPolicy::AlternateSplit,
            Dictionary::TensorProduct(_) => GrowthPolicy::TensorBalanced,
            _ => GrowthPolicy::FlatUnitStep,
        };
        Self::new(dictionary, policy).expect("policy chosen from the dictionary shape")
    }

    /// Caps the totals that [`TruncationSchedule::nearest_reachable`] may return.
    pub fn with_max_total(mut self, max_total: usize) -> Self {
        self.max_total = Some(max_total);
        self
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn policy(&self) -> GrowthPolicy {
        self.policy
    }

    /// The truncation at step `index` (1-based).
    pub fn step(&self, index: usize) -> Step {
        assert!(index >= 1, "schedule steps start at 1");
        Step { index, descriptor: descriptor_for(&self.dictionary, index) }
    }

    pub fn first(&self) -> Step {
        self.step(1)
    }

    pub fn total_at(&self, index: usize) -> usize {
        self.step(index).total()
    }

    /// Largest reachable total `≤ target` (`Down`) or smallest `≥ target` (`Up`).
    pub fn nearest_reachable(&self, target: usize, direction: Direction) -> Result<Step> {
        let none = || Error::NoReachable {
            target,
            direction: match direction {
                Direction::Down => "<=",
                Direction::Up => ">=",
            },
        };
        if target == 0 {
            return match direction {
                Direction::Down => Err(none()),
                Direction::Up => Ok(self.first()),
            };
        }
        // total(j) >= j for every schedule, so the answer has index <= target
        let step = match direction {
            Direction::Down => {
                if self.total_at(1) > target {
                    return Err(none());
                }
                let (mut lo, mut hi) = (1usize, target);
                while lo < hi {
                    let mid = lo + (hi - lo).div_ceil(2);
                    if self.total_at(mid) <= target {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                self.step(lo)
            }
            Direction::Up => {
                let (mut lo, mut hi) = (1usize, target);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.total_at(mid) >= target {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                self.step(lo)
            }
        };
        match self.max_total {
            Some(max) if step.total() > max => Err(none()),
            _ => Ok(step),
        }
    }

    /// The step following `index` when the total size is doubled: the
    /// smallest reachable truncation with at least twice the elements.
    pub fn doubled(&self, index: usize) -> Step {
        let target = 2 * self.total_at(index);
        let step = self.nearest_reachable(target, Direction::Up).unwrap_or_else(|_| self.step(index + 1));
        if step.index > index {
            step
        } else {
            self.step(index + 1)
        }
    }
}

fn split_counter(counter: usize, parts: usize, i: usize) -> usize {
    1 + (counter - 1 + parts - 1 - i) / parts
}

fn descriptor_for(dict: &Dictionary, counter: usize) -> Descriptor {
    match dict {
        Dictionary::Fourier { .. } | Dictionary::Chebyshev { .. } => Descriptor::Flat(counter),
        Dictionary::Weighted { inner, .. } => descriptor_for(inner, counter),
        Dictionary::Concatenation(parts) => Descriptor::Split(
            parts
                .iter()
                .enumerate()
                .map(|(i, p)| descriptor_for(p, split_counter(counter, parts.len(), i)))
                .collect(),
        ),
        Dictionary::TensorProduct(factors) => Descriptor::Grid(
            factors
                .iter()
                .enumerate()
                .map(|(i, f)| descriptor_for(f, split_counter(counter, factors.len(), i)))
                .collect(),
        ),
    }
}
