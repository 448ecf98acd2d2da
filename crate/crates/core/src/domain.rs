//! Approximation domains: intervals, boxes and masked subsets of a bounding box.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default per-dimension resolution of the reference grid used to estimate
/// the measure of a masked domain.
pub const DEFAULT_MASK_RESOLUTION: usize = 512;

pub type Indicator = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Interval,
    Box,
    Masked { indicator: Indicator, label: String },
}

/// A bounded domain `Ω` described by its bounding box and, for irregular
/// shapes, an indicator function.
#[derive(Clone)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
    kind: Kind,
    measure: f64,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Interval => write!(f, "Interval({}, {})", self.bounds[0].0, self.bounds[0].1),
            Kind::Box => write!(f, "Box({:?})", self.bounds),
            Kind::Masked { label, .. } => {
                write!(f, "Masked({label}, box={:?}, measure={})", self.bounds, self.measure)
            }
        }
    }
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::InvalidDomain("zero-dimensional box".into()));
    }
    for &(a, b) in bounds {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidDomain(format!("[{a}, {b}] is not a proper interval")));
        }
    }
    Ok(())
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        check_bounds(&[(a, b)])?;
        Ok(Self { bounds: vec![(a, b)], kind: Kind::Interval, measure: b - a })
    }

    pub fn cube(bounds: Vec<(f64, f64)>) -> Result<Self> {
        check_bounds(&bounds)?;
        if bounds.len() == 1 {
            return Self::interval(bounds[0].0, bounds[0].1);
        }
        let measure = bounds.iter().map(|(a, b)| b - a).product();
        Ok(Self { bounds, kind: Kind::Box, measure })
    }

    /// A subset of `bounds` selected by `indicator`. The measure is estimated
    /// on a `resolution^d` midpoint grid of the bounding box.
    pub fn masked<F>(bounds: Vec<(f64, f64)>, label: &str, resolution: usize, indicator: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        check_bounds(&bounds)?;
        if resolution == 0 {
            return Err(Error::InvalidParameter("mask resolution must be positive".into()));
        }
        let counts = vec![resolution; bounds.len()];
        let mut inside = 0usize;
        let mut total = 0usize;
        for_each_grid_point(&bounds, &counts, |x| {
            total += 1;
            if indicator(x) {
                inside += 1;
            }
        });
        if inside == 0 {
            return Err(Error::DegenerateMask);
        }
        let box_measure: f64 = bounds.iter().map(|(a, b)| b - a).product();
        let measure = box_measure * inside as f64 / total as f64;
        Ok(Self {
            bounds,
            kind: Kind::Masked { indicator: Arc::new(indicator), label: label.to_string() },
            measure,
        })
    }

    /// The closed disk with the given centre and radius, embedded in `bounds`.
    pub fn disk(center: (f64, f64), radius: f64, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!("disk radius {radius} must be positive")));
        }
        let r2 = radius * radius;
        let label = format!("disk(center=({}, {}), radius={radius})", center.0, center.1);
        Self::masked(bounds, &label, DEFAULT_MASK_RESOLUTION, move |x: &[f64]| {
            let (dx, dy) = (x[0] - center.0, x[1] - center.1);
            dx * dx + dy * dy <= r2
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// `|Ω|`, exact for intervals and boxes, estimated for masked domains.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn is_masked(&self) -> bool {
        matches!(self.kind, Kind::Masked { .. })
    }

    pub fn in_bounding_box(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.bounds).all(|(&v, &(a, b))| v >= a && v <= b)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if !self.in_bounding_box(x) {
            return false;
        }
        match &self.kind {
            Kind::Masked { indicator, .. } => indicator(x),
            _ => true,
        }
    }
}

/// Visits the midpoints of a `counts[0] × … × counts[d-1]` grid on `bounds`,
/// last coordinate varying fastest.
pub(crate) fn for_each_grid_point(bounds: &[(f64, f64)], counts: &[usize], mut visit: impl FnMut(&[f64])) {
    let d = bounds.len();
    if counts.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for k in 0..d {
            let (a, b) = bounds[k];
            x[k] = a + (idx[k] as f64 + 0.5) * (b - a) / counts[k] as f64;
        }
        visit(&x);
        let mut k = d;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}
