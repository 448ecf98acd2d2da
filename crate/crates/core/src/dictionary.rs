//! Function dictionaries and structured truncations.
//!
//! A [`Dictionary`] is an infinite indexed family `{φₖ}`; a [`Descriptor`]
//! selects a finite truncation `Φ_N` of it. Base dictionaries are orthonormal
//! on their own box `Ξ`:
//!
//! * Fourier series on `[a, b]`: `exp(2πi k (x - a)/(b - a)) / √(b - a)`, with
//!   the frequencies enumerated `0, 1, -1, 2, -2, …` so every prefix is as
//!   symmetric as possible.
//! * Chebyshev polynomials mapped to `[a, b]`, orthonormal for the Chebyshev
//!   weight `1/√(1 - t²)` of the mapped variable `t`.
//!
//! Composite dictionaries are built from these by pointwise weighting,
//! concatenation (sizes add) and tensor products (sizes multiply).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative slack allowed when checking that a point lies in `Ξ`.
const BOX_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn join(self, other: Self) -> Self {
        if self == Self::Complex || other == Self::Complex {
            Self::Complex
        } else {
            Self::Real
        }
    }
}

/// A pointwise real weight `w(x)` for [`Dictionary::Weighted`].
#[derive(Clone)]
pub struct WeightFn {
    label: String,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl WeightFn {
    pub fn new<F>(label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.to_string(), f: Arc::new(f) }
    }

    /// `√(x₁² + … + x_d²)`, the weight of the singular part in the 2-D disk example.
    pub fn radial() -> Self {
        Self::new("sqrt(x^2+y^2)", |x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFn({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum Dictionary {
    Fourier { a: f64, b: f64 },
    Chebyshev { a: f64, b: f64 },
    Weighted { weight: WeightFn, inner: Box<Dictionary> },
    Concatenation(Vec<Dictionary>),
    TensorProduct(Vec<Dictionary>),
}

/// Size of a truncation, mirroring the shape of the dictionary it truncates.
///
/// `Flat` truncates a base (or weighted base) dictionary, `Split` a
/// concatenation (one descriptor per part) and `Grid` a tensor product (one
/// descriptor per factor).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Flat(usize),
    Split(Vec<Descriptor>),
    Grid(Vec<Descriptor>),
}

/// Structured position of an element inside a truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementIndex {
    Leaf(usize),
    Part { part: usize, inner: Box<ElementIndex> },
    Grid(Vec<ElementIndex>),
}

impl Descriptor {
    pub fn total(&self) -> usize {
        match self {
            Self::Flat(n) => *n,
            Self::Split(parts) => parts.iter().map(Self::total).sum(),
            Self::Grid(factors) => factors.iter().map(Self::total).product(),
        }
    }

    /// Maps a flat index to its structured position. Concatenated parts are
    /// laid out one after the other; grids are row-major with the first
    /// factor varying slowest.
    pub fn locate(&self, k: usize) -> Result<ElementIndex> {
        let total = self.total();
        if k >= total {
            return Err(Error::IndexOutOfRange { index: k, total });
        }
        Ok(match self {
            Self::Flat(_) => ElementIndex::Leaf(k),
            Self::Split(parts) => {
                let mut offset = 0;
                let mut found = None;
                for (p, part) in parts.iter().enumerate() {
                    let n = part.total();
                    if k < offset + n {
                        found = Some(ElementIndex::Part { part: p, inner: Box::new(part.locate(k - offset)?) });
                        break;
                    }
                    offset += n;
                }
                found.expect("index below total always lands in a part")
            }
            Self::Grid(factors) => {
                let mut rest = k;
                let mut idx = vec![ElementIndex::Leaf(0); factors.len()];
                for (i, factor) in factors.iter().enumerate().rev() {
                    let n = factor.total();
                    idx[i] = factor.locate(rest % n)?;
                    rest /= n;
                }
                ElementIndex::Grid(idx)
            }
        })
    }

    /// Inverse of [`Descriptor::locate`].
    pub fn flat_index(&self, idx: &ElementIndex) -> Result<usize> {
        let mismatch = || Error::DescriptorMismatch(format!("{idx:?} does not index {self:?}"));
        match (self, idx) {
            (Self::Flat(n), ElementIndex::Leaf(k)) if k < n => Ok(*k),
            (Self::Split(parts), ElementIndex::Part { part, inner }) if *part < parts.len() => {
                let offset: usize = parts[..*part].iter().map(Self::total).sum();
                Ok(offset + parts[*part].flat_index(inner)?)
            }
            (Self::Grid(factors), ElementIndex::Grid(sub)) if sub.len() == factors.len() => {
                let mut k = 0;
                for (factor, s) in factors.iter().zip(sub) {
                    k = k * factor.total() + factor.flat_index(s)?;
                }
                Ok(k)
            }
            _ => Err(mismatch()),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[Descriptor], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, d) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{d}")?;
            }
            write!(f, ")")
        };
        match self {
            Self::Flat(n) => write!(f, "{n}"),
            Self::Split(parts) => join(f, parts, "+"),
            Self::Grid(factors) => join(f, factors, "x"),
        }
    }
}

/// Frequency of the `k`-th (0-based) Fourier element: `0, 1, -1, 2, -2, …`.
pub fn fourier_frequency(k: usize) -> i64 {
    if k % 2 == 1 {
        k.div_ceil(2) as i64
    } else {
        -((k / 2) as i64)
    }
}

impl Dictionary {
    pub fn fourier(a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        Ok(Self::Fourier { a, b })
    }

    /// Tensor-product Fourier series on a `d`-dimensional box. A
    /// one-dimensional box gives the plain [`Dictionary::Fourier`].
    pub fn fourier_box(bounds: &[(f64, f64)]) -> Result<Self> {
        let factors = bounds.iter().map(|&(a, b)| Self::fourier(a, b)).collect::<Result<Vec<_>>>()?;
        match factors.len() {
            0 => Err(Error::InvalidDomain("zero-dimensional box".into())),
            1 => Ok(factors.into_iter().next().unwrap()),
            _ => Ok(Self::TensorProduct(factors)),
        }
    }

    pub fn chebyshev(a: f64, b: f64) -> Result<Self> {
        check_interval(a, b)?;
        Ok(Self::Chebyshev { a, b })
    }

    pub fn weighted(weight: WeightFn, inner: Dictionary) -> Self {
        Self::Weighted { weight, inner: Box::new(inner) }
    }

    pub fn concat(parts: Vec<Dictionary>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidParameter("concatenation needs at least one part".into()));
        };
        if parts.iter().any(|p| p.dim() != first.dim()) {
            return Err(Error::InvalidParameter("concatenated parts must share a dimension".into()));
        }
        Ok(Self::Concatenation(parts))
    }

    pub fn tensor(factors: Vec<Dictionary>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("tensor product needs at least one factor".into()));
        }
        Ok(Self::TensorProduct(factors))
    }

    /// `Ψ ∪ w·Ψ`: a dictionary concatenated with a weighted copy of itself.
    pub fn with_weighted_copy(base: Dictionary, weight: WeightFn) -> Self {
        Self::Concatenation(vec![base.clone(), Self::weighted(weight, base)])
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Fourier { .. } | Self::Chebyshev { .. } => 1,
            Self::Weighted { inner, .. } => inner.dim(),
            Self::Concatenation(parts) => parts[0].dim(),
            Self::TensorProduct(factors) => factors.iter().map(Self::dim).sum(),
        }
    }

    /// The box `Ξ` on which the base elements live.
    pub fn support(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Fourier { a, b } | Self::Chebyshev { a, b } => vec![(*a, *b)],
            Self::Weighted { inner, .. } => inner.support(),
            Self::Concatenation(parts) => {
                let mut bounds = parts[0].support();
                for p in &parts[1..] {
                    for (acc, (a, b)) in bounds.iter_mut().zip(p.support()) {
                        acc.0 = acc.0.max(a);
                        acc.1 = acc.1.min(b);
                    }
                }
                bounds
            }
            Self::TensorProduct(factors) => factors.iter().flat_map(Self::support).collect(),
        }
    }

    pub fn scalar_field(&self) -> ScalarField {
        match self {
            Self::Fourier { .. } => ScalarField::Complex,
            Self::Chebyshev { .. } => ScalarField::Real,
            Self::Weighted { inner, .. } => inner.scalar_field(),
            Self::Concatenation(items) | Self::TensorProduct(items) => {
                items.iter().fold(ScalarField::Real, |acc, d| acc.join(d.scalar_field()))
            }
        }
    }

    /// Checks that `desc` has the shape of this dictionary.
    pub fn check(&self, desc: &Descriptor) -> Result<()> {
        let mismatch = || Error::DescriptorMismatch(format!("{desc} does not fit {}", self.shape_name()));
        match (self, desc) {
            (Self::Fourier { .. } | Self::Chebyshev { .. }, Descriptor::Flat(_)) => Ok(()),
            (Self::Weighted { inner, .. }, d) => inner.check(d),
            (Self::Concatenation(parts), Descriptor::Split(sizes)) if parts.len() == sizes.len() => {
                parts.iter().zip(sizes).try_for_each(|(p, s)| p.check(s))
            }
            (Self::TensorProduct(factors), Descriptor::Grid(sizes)) if factors.len() == sizes.len() => {
                factors.iter().zip(sizes).try_for_each(|(p, s)| p.check(s))
            }
            _ => Err(mismatch()),
        }
    }

    fn shape_name(&self) -> &'static str {
        match self {
            Self::Fourier { .. } => "a Fourier series",
            Self::Chebyshev { .. } => "a Chebyshev series",
            Self::Weighted { .. } => "a weighted dictionary",
            Self::Concatenation(_) => "a concatenation",
            Self::TensorProduct(_) => "a tensor product",
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        let support = self.support();
        let inside = x.len() == support.len()
            && x.iter().zip(&support).all(|(&v, &(a, b))| {
                let slack = BOX_SLACK * (b - a);
                v >= a - slack && v <= b + slack
            });
        if inside {
            Ok(())
        } else {
            Err(Error::PointOutsideBox { point: x.to_vec() })
        }
    }

    /// `φₖ(x)` for the 0-based flat index `k` of the truncation `desc`.
    pub fn eval_element(&self, desc: &Descriptor, k: usize, x: &[f64]) -> Result<Complex64> {
        self.check(desc)?;
        self.check_point(x)?;
        let idx = desc.locate(k)?;
        Ok(self.element_at(desc, &idx, x))
    }

    fn element_at(&self, desc: &Descriptor, idx: &ElementIndex, x: &[f64]) -> Complex64 {
        match (self, desc, idx) {
            (Self::Fourier { a, b }, _, ElementIndex::Leaf(k)) => fourier_value(*a, *b, *k, x[0]),
            (Self::Chebyshev { a, b }, _, ElementIndex::Leaf(k)) => {
                let t = map_to_unit(*a, *b, x[0]);
                let tk = (*k as f64 * t.acos()).cos();
                Complex64::new(tk * chebyshev_scale(*a, *b, *k), 0.0)
            }
            (Self::Weighted { weight, inner }, d, i) => inner.element_at(d, i, x) * weight.eval(x),
            (Self::Concatenation(parts), Descriptor::Split(sizes), ElementIndex::Part { part, inner }) => {
                parts[*part].element_at(&sizes[*part], inner, x)
            }
            (Self::TensorProduct(factors), Descriptor::Grid(sizes), ElementIndex::Grid(sub)) => {
                let mut offset = 0;
                let mut value = Complex64::new(1.0, 0.0);
                for ((factor, size), s) in factors.iter().zip(sizes).zip(sub) {
                    let d = factor.dim();
                    value *= factor.element_at(size, s, &x[offset..offset + d]);
                    offset += d;
                }
                value
            }
            _ => unreachable!("descriptor was checked against the dictionary"),
        }
    }

    /// Evaluates every element of the truncation at `x`, in flat order.
    pub fn eval_row(&self, desc: &Descriptor, x: &[f64]) -> Result<Vec<Complex64>> {
        self.check(desc)?;
        self.check_point(x)?;
        let mut out = vec![Complex64::default(); desc.total()];
        self.fill_row(desc, x, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`Dictionary::eval_row`]; `out.len()` must equal
    /// `desc.total()` and `desc` must already be validated.
    pub(crate) fn fill_row(&self, desc: &Descriptor, x: &[f64], out: &mut [Complex64]) {
        match (self, desc) {
            (Self::Fourier { a, b }, _) => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = fourier_value(*a, *b, k, x[0]);
                }
            }
            (Self::Chebyshev { a, b }, _) => {
                let t = map_to_unit(*a, *b, x[0]);
                let (mut prev, mut cur) = (1.0, t);
                for (k, o) in out.iter_mut().enumerate() {
                    let tk = match k {
                        0 => 1.0,
                        1 => t,
                        _ => {
                            let next = 2.0 * t * cur - prev;
                            prev = cur;
                            cur = next;
                            next
                        }
                    };
                    *o = Complex64::new(tk * chebyshev_scale(*a, *b, k), 0.0);
                }
            }
            (Self::Weighted { weight, inner }, d) => {
                inner.fill_row(d, x, out);
                let w = weight.eval(x);
                out.iter_mut().for_each(|v| *v *= w);
            }
            (Self::Concatenation(parts), Descriptor::Split(sizes)) => {
                let mut offset = 0;
                for (part, size) in parts.iter().zip(sizes) {
                    let n = size.total();
                    part.fill_row(size, x, &mut out[offset..offset + n]);
                    offset += n;
                }
            }
            (Self::TensorProduct(factors), Descriptor::Grid(sizes)) => {
                out.fill(Complex64::new(1.0, 0.0));
                let mut block = out.len();
                let mut offset = 0;
                for (factor, size) in factors.iter().zip(sizes) {
                    let d = factor.dim();
                    let n = size.total();
                    let mut row = vec![Complex64::default(); n];
                    factor.fill_row(size, &x[offset..offset + d], &mut row);
                    offset += d;
                    // row-major: this factor's index changes every `block / n` entries
                    block /= n;
                    for (k, o) in out.iter_mut().enumerate() {
                        *o *= row[(k / block) % n];
                    }
                }
            }
            _ => unreachable!("descriptor was checked against the dictionary"),
        }
    }

    /// `Σₖ cₖ φₖ(x)`.
    pub fn eval_expansion(&self, desc: &Descriptor, coefficients: &[Complex64], x: &[f64]) -> Result<Complex64> {
        if coefficients.len() != desc.total() {
            return Err(Error::LengthMismatch { expected: desc.total(), got: coefficients.len() });
        }
        let row = self.eval_row(desc, x)?;
        Ok(row.iter().zip(coefficients).map(|(p, c)| p * c).sum())
    }

    /// A nonnegative "degree" per element: the polynomial degree for
    /// Chebyshev, `|frequency|` for Fourier, summed over tensor factors.
    pub fn degrees(&self, desc: &Descriptor) -> Result<Vec<f64>> {
        self.check(desc)?;
        Ok((0..desc.total())
            .map(|k| self.degree_at(desc, &desc.locate(k).expect("k < total")))
            .collect())
    }

    fn degree_at(&self, desc: &Descriptor, idx: &ElementIndex) -> f64 {
        match (self, desc, idx) {
            (Self::Fourier { .. }, _, ElementIndex::Leaf(k)) => fourier_frequency(*k).unsigned_abs() as f64,
            (Self::Chebyshev { .. }, _, ElementIndex::Leaf(k)) => *k as f64,
            (Self::Weighted { inner, .. }, d, i) => inner.degree_at(d, i),
            (Self::Concatenation(parts), Descriptor::Split(sizes), ElementIndex::Part { part, inner }) => {
                parts[*part].degree_at(&sizes[*part], inner)
            }
            (Self::TensorProduct(factors), Descriptor::Grid(sizes), ElementIndex::Grid(sub)) => {
                factors.iter().zip(sizes).zip(sub).map(|((f, s), i)| f.degree_at(s, i)).sum()
            }
            _ => unreachable!("descriptor was checked against the dictionary"),
        }
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("[{a}, {b}] is not a proper interval")))
    }
}

fn fourier_value(a: f64, b: f64, k: usize, x: f64) -> Complex64 {
    let len = b - a;
    let theta = 2.0 * PI * fourier_frequency(k) as f64 * (x - a) / len;
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s) / len.sqrt()
}

fn map_to_unit(a: f64, b: f64, x: f64) -> f64 {
    ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0)
}

fn chebyshev_scale(a: f64, b: f64, k: usize) -> f64 {
    let half = 0.5 * (b - a);
    if k == 0 {
        1.0 / (PI * half).sqrt()
    } else {
        1.0 / (0.5 * PI * half).sqrt()
    }
}
