//! Weighted point sampling on `Ω` and assembly of the least-squares system.
//!
//! The sampling functionals are `l_m(f) = w_m f(x_m)` with equal weights
//! `w = √(|Ω|/M)`, so that `‖f‖²_M = Σ w²|f(x_m)|²` is a Riemann sum for
//! `‖f‖²_{L²(Ω)}`. For any coefficient vector `z` the discrete residual
//! `‖Az - b‖` is then exactly the `M`-norm of `f - Σ zₙφₙ`.

use std::io::{self, Write};
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dictionary::{Descriptor, Dictionary, ScalarField};
use crate::domain::{for_each_grid_point, Domain};
use crate::error::{Error, Result};
use crate::function::Function;

/// Growth factor per refinement of a masked grid, and the refinement cap.
const MASK_REFINE_FACTOR: f64 = 1.1;
const MASK_REFINE_LIMIT: usize = 200;
/// Rejection sampling gives up after this many draws per requested point.
const REJECTION_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    /// Midpoints of an equispaced grid on the bounding box, restricted to `Ω`.
    Equispaced,
    /// Uniform random points in `Ω` (rejection from the bounding box).
    RandomUniform,
}

#[derive(Clone, Debug)]
pub struct SamplingScheme {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    measure: f64,
}

impl SamplingScheme {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, m: usize) -> &[f64] {
        &self.coords[m * self.dim..(m + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The domain measure the weights were derived from.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// `x1,…,xd,weight` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).chain(["weight".into()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for (x, w) in self.points().zip(&self.weights) {
            let cols: Vec<String> = x.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{},{w:e}", cols.join(","))?;
        }
        Ok(())
    }
}

/// Linear oversampling `M = ⌈γN⌉`, never fewer than `N + 1` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OversamplingRule {
    gamma: f64,
}

impl Default for OversamplingRule {
    fn default() -> Self {
        Self { gamma: 2.0 }
    }
}

impl OversamplingRule {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(Self { gamma })
        } else {
            Err(Error::InvalidParameter(format!("oversampling factor {gamma} must exceed 1")))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn samples(&self, n: usize) -> usize {
        ((self.gamma * n as f64).ceil() as usize).max(n + 1)
    }
}

/// Grid counts with roughly equal spacing in every direction and at least
/// `target` points in total.
fn grid_counts(bounds: &[(f64, f64)], target: f64) -> Vec<usize> {
    let d = bounds.len();
    let volume: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let h = (volume / target).powf(1.0 / d as f64);
    let mut counts: Vec<usize> = bounds.iter().map(|(a, b)| (((b - a) / h).round() as usize).max(1)).collect();
    while (counts.iter().product::<usize>() as f64) < target {
        // grow the coarsest direction
        let k = (0..d)
            .max_by(|&i, &j| {
                let hi = (bounds[i].1 - bounds[i].0) / counts[i] as f64;
                let hj = (bounds[j].1 - bounds[j].0) / counts[j] as f64;
                hi.total_cmp(&hj)
            })
            .unwrap();
        counts[k] += 1;
    }
    counts
}

fn equispaced_points(domain: &Domain, m: usize) -> Result<Vec<f64>> {
    let bounds = domain.bounds();
    if !domain.is_masked() {
        let counts = grid_counts(bounds, m as f64);
        let mut coords = Vec::with_capacity(counts.iter().product::<usize>() * bounds.len());
        for_each_grid_point(bounds, &counts, |x| coords.extend_from_slice(x));
        return Ok(coords);
    }
    let box_measure: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let mut target = m as f64 * box_measure / domain.measure();
    for _ in 0..MASK_REFINE_LIMIT {
        let counts = grid_counts(bounds, target);
        let mut coords = Vec::new();
        for_each_grid_point(bounds, &counts, |x| {
            if domain.contains(x) {
                coords.extend_from_slice(x);
            }
        });
        if coords.len() / bounds.len() >= m {
            return Ok(coords);
        }
        target *= MASK_REFINE_FACTOR;
    }
    Err(Error::DegenerateMask)
}

/// Uniform random points in `domain`, by rejection from its bounding box.
pub fn random_points(domain: &Domain, count: usize, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    let bounds = domain.bounds();
    let mut points = Vec::with_capacity(count);
    let mut draws = 0usize;
    while points.len() < count {
        if draws > REJECTION_LIMIT * count.max(1) {
            return Err(Error::DegenerateMask);
        }
        draws += 1;
        let x: Vec<f64> = bounds.iter().map(|&(a, b)| rng.random_range(a..b)).collect();
        if domain.contains(&x) {
            points.push(x);
        }
    }
    Ok(points)
}

/// Generates at least `m` sampling points in `domain` with Riemann weights.
/// For boxes and masked domains the actual count may exceed `m`; the weights
/// use the actual count.
pub fn generate_scheme(domain: &Domain, m: usize, kind: PointKind, seed: u64) -> Result<SamplingScheme> {
    if m == 0 {
        return Err(Error::InvalidParameter("a sampling scheme needs at least one point".into()));
    }
    let coords = match kind {
        PointKind::Equispaced => equispaced_points(domain, m)?,
        PointKind::RandomUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_points(domain, m, &mut rng)?.concat()
        }
    };
    let dim = domain.dim();
    let count = coords.len() / dim;
    let w = (domain.measure() / count as f64).sqrt();
    Ok(SamplingScheme { dim, coords, weights: vec![w; count], measure: domain.measure() })
}

/// `b_m = w_m f(x_m)`.
pub fn sample_function(f: &Function, scheme: &SamplingScheme) -> Result<Vec<Complex64>> {
    scheme
        .points()
        .zip(scheme.weights())
        .map(|(x, &w)| {
            let v = f.eval(x);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v * w)
            } else {
                Err(Error::NonFinite { point: x.to_vec(), value: format!("{v}") })
            }
        })
        .collect()
}

/// The discrete least-squares problem `A c ≈ b` with `A_{mn} = w_m φₙ(x_m)`.
#[derive(Clone, Debug)]
pub struct LeastSquaresSystem {
    pub matrix: Mat<Complex64>,
    pub rhs: Vec<Complex64>,
    pub scheme: Arc<SamplingScheme>,
    pub descriptor: Descriptor,
    pub field: ScalarField,
}

impl LeastSquaresSystem {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// `‖b‖ = ‖f‖_M`.
    pub fn rhs_norm(&self) -> f64 {
        norm(&self.rhs)
    }

    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.matrix, z)
    }

    /// `‖Az - b‖`.
    pub fn residual_norm(&self, z: &[Complex64]) -> f64 {
        let az = self.apply(z);
        az.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// The system restricted to the first `n` columns (the first `n`
    /// elements in flat order), sharing rows and right-hand side.
    pub fn leading_columns(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.cols() {
            return Err(Error::IndexOutOfRange { index: n, total: self.cols() });
        }
        Ok(Self {
            matrix: self.matrix.subcols(0, n).to_owned(),
            rhs: self.rhs.clone(),
            scheme: self.scheme.clone(),
            descriptor: Descriptor::Flat(n),
            field: self.field,
        })
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn matvec(a: &Mat<Complex64>, z: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), z.len());
    let mut out = vec![Complex64::default(); a.nrows()];
    for (j, zj) in z.iter().enumerate() {
        if *zj == Complex64::default() {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * zj;
        }
    }
    out
}

/// Builds `A` and `b` on a given scheme.
pub fn assemble_on_scheme(
    dict: &Dictionary,
    desc: &Descriptor,
    f: &Function,
    scheme: Arc<SamplingScheme>,
) -> Result<LeastSquaresSystem> {
    dict.check(desc)?;
    let n = desc.total();
    let m = scheme.len();
    let mut data = vec![Complex64::default(); m * n];
    for ((x, &w), row) in scheme.points().zip(scheme.weights()).zip(data.chunks_exact_mut(n.max(1))) {
        dict.check_point(x)?;
        dict.fill_row(desc, x, row);
        row.iter_mut().for_each(|v| *v *= w);
    }
    let matrix = Mat::from_fn(m, n, |i, j| data[i * n + j]);
    let rhs = sample_function(f, &scheme)?;
    Ok(LeastSquaresSystem { matrix, rhs, scheme, descriptor: desc.clone(), field: dict.scalar_field() })
}

/// Builds the system for truncation `desc` with `M = rule.samples(N)` points.
pub fn assemble_system(
    dict: &Dictionary,
    desc: &Descriptor,
    f: &Function,
    rule: OversamplingRule,
    domain: &Domain,
    kind: PointKind,
    seed: u64,
) -> Result<LeastSquaresSystem> {
    dict.check(desc)?;
    let scheme = generate_scheme(domain, rule.samples(desc.total()), kind, seed)?;
    assemble_on_scheme(dict, desc, f, Arc::new(scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(a: f64, b: f64) -> Domain {
        Domain::interval(a, b).unwrap()
    }

    #[test]
    fn equispaced_interval_weights() {
        let s = generate_scheme(&interval(-1.0, 1.0), 100, PointKind::Equispaced, 0).unwrap();
        assert_eq!(s.len(), 100);
        for &w in s.weights() {
            assert!((w - (0.02f64).sqrt()).abs() < 1e-15);
        }
        assert!((s.point(0)[0] + 0.99).abs() < 1e-15);
        let one = generate_scheme(&interval(0.0, 1.0), 1, PointKind::Equispaced, 0).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.weights()[0], 1.0);
        assert_eq!(one.point(0), &[0.5]);
    }

    #[test]
    fn zero_points_is_an_error() {
        assert!(generate_scheme(&interval(0.0, 1.0), 0, PointKind::Equispaced, 0).is_err());
    }

    #[test]
    fn disk_scheme_points_inside_and_weights_sum_to_area() {
        let d = Domain::disk((0.0, 0.0), 0.9, vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        for kind in [PointKind::Equispaced, PointKind::RandomUniform] {
            let s = generate_scheme(&d, 200, kind, 3).unwrap();
            assert!(s.len() >= 200);
            assert!(s.points().all(|x| x[0] * x[0] + x[1] * x[1] <= 0.81));
            let area: f64 = s.weights().iter().map(|w| w * w).sum();
            let exact = std::f64::consts::PI * 0.81;
            assert!((area - exact).abs() / exact < 0.05, "{area}");
        }
    }

    #[test]
    fn riemann_norms() {
        let one = generate_scheme(&interval(-1.0, 1.0), 400, PointKind::Equispaced, 0).unwrap();
        let b = sample_function(&Function::constant(1.0), &one).unwrap();
        assert!((norm(&b).powi(2) - 2.0).abs() < 1e-2);
        let unit = generate_scheme(&interval(0.0, 1.0), 1000, PointKind::Equispaced, 0).unwrap();
        let b = sample_function(&Function::identity(), &unit).unwrap();
        assert!((norm(&b).powi(2) - 1.0 / 3.0).abs() < 1e-2);
        let b = sample_function(&Function::zero(), &unit).unwrap();
        assert!(b.iter().all(|v| *v == Complex64::default()));
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let s = generate_scheme(&interval(-1.0, 1.0), 4, PointKind::Equispaced, 0).unwrap();
        let f = Function::real("1/x-ish", |x| if x[0] > 0.0 { f64::NAN } else { 0.0 });
        assert!(matches!(sample_function(&f, &s), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn oversampling_rule() {
        let r = OversamplingRule::default();
        assert_eq!(r.samples(11), 22);
        assert_eq!(OversamplingRule::new(1.01).unwrap().samples(10), 11);
        assert!(OversamplingRule::new(1.0).is_err());
    }

    #[test]
    fn constant_mode_system() {
        let dict = Dictionary::fourier(-2.0, 2.0).unwrap();
        let sys = assemble_system(
            &dict,
            &Descriptor::Flat(1),
            &Function::constant(1.0),
            OversamplingRule::default(),
            &interval(-2.0, 2.0),
            PointKind::Equispaced,
            0,
        )
        .unwrap();
        assert_eq!((sys.rows(), sys.cols()), (2, 1));
        let w = 2f64.sqrt();
        for i in 0..2 {
            assert!((sys.matrix[(i, 0)] - Complex64::new(w * 0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = generate_scheme(&interval(0.0, 1.0), 3, PointKind::Equispaced, 0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x1,weight\n"));
    }
}
