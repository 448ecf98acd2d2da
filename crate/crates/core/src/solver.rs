//! Truncated-SVD solvers for ill-conditioned least-squares systems.
//!
//! `tsvd_solve` computes `c = V Σ⁺_ε Uᴴ b`, where `Σ⁺_ε` inverts the singular
//! values `σ ≥ ε` and zeroes the rest. Among all vectors in the span of the
//! retained right singular vectors, `c` minimizes the residual and has the
//! smallest norm. The threshold is absolute unless [`Threshold::Relative`] is
//! requested.

use faer::Mat;
use num_complex::Complex64;

use crate::dictionary::ScalarField;
use crate::error::{Error, Result};
use crate::sampling::{norm, LeastSquaresSystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// Drop singular values below `ε`.
    Absolute(f64),
    /// Drop singular values below `ε · σ_max`.
    Relative(f64),
}

impl Threshold {
    pub fn epsilon(self) -> f64 {
        match self {
            Self::Absolute(e) | Self::Relative(e) => e,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegularizedSolution {
    pub coefficients: Vec<Complex64>,
    /// `‖Ac - b‖`, recomputed from the matrix.
    pub residual_norm: f64,
    /// The threshold `ε` that was requested.
    pub epsilon: f64,
    /// All singular values of the solved matrix, descending.
    pub singular_values: Vec<f64>,
    /// Number of singular values kept (`σ ≥` the effective cutoff).
    pub retained_rank: usize,
    pub coefficient_norm: f64,
}

/// Thin SVD `A = U Σ Vᴴ` lifted to complex storage.
pub(crate) struct Svd {
    pub u: Mat<Complex64>,
    pub s: Vec<f64>,
    pub v: Mat<Complex64>,
}

pub(crate) fn thin_svd(a: &Mat<Complex64>, field: ScalarField) -> Result<Svd> {
    let finite = (0..a.ncols()).all(|j| a.col(j).iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    if !finite {
        return Err(Error::Svd("matrix has non-finite entries".into()));
    }
    match field {
        ScalarField::Real => {
            let re = Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re);
            let svd = re.thin_svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
            let (u, v) = (svd.U(), svd.V());
            Ok(Svd {
                u: Mat::from_fn(u.nrows(), u.ncols(), |i, j| Complex64::new(u[(i, j)], 0.0)),
                s: (0..u.ncols()).map(|k| svd.S()[k]).collect(),
                v: Mat::from_fn(v.nrows(), v.ncols(), |i, j| Complex64::new(v[(i, j)], 0.0)),
            })
        }
        ScalarField::Complex => {
            let svd = a.thin_svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
            Ok(Svd {
                s: (0..svd.U().ncols()).map(|k| svd.S()[k].re).collect(),
                u: svd.U().to_owned(),
                v: svd.V().to_owned(),
            })
        }
    }
}

fn check_threshold(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("threshold {eps} must be finite and nonnegative")))
    }
}

/// Solves `A c ≈ b` with an absolute singular-value cutoff `ε`.
pub fn tsvd_solve(system: &LeastSquaresSystem, eps: f64) -> Result<RegularizedSolution> {
    tsvd_solve_with(system, Threshold::Absolute(eps))
}

pub fn tsvd_solve_with(system: &LeastSquaresSystem, threshold: Threshold) -> Result<RegularizedSolution> {
    solve_matrix(&system.matrix, &system.rhs, system.field, threshold)
}

pub(crate) fn solve_matrix(
    a: &Mat<Complex64>,
    b: &[Complex64],
    field: ScalarField,
    threshold: Threshold,
) -> Result<RegularizedSolution> {
    let eps = threshold.epsilon();
    check_threshold(eps)?;
    if a.nrows() < a.ncols() {
        return Err(Error::Underdetermined { rows: a.nrows(), cols: a.ncols() });
    }
    let svd = thin_svd(a, field)?;
    let cutoff = match threshold {
        Threshold::Absolute(e) => e,
        Threshold::Relative(e) => e * svd.s.first().copied().unwrap_or(0.0),
    };
    // ties at the cutoff are kept; a zero singular value never is
    let retained: Vec<usize> = (0..svd.s.len()).filter(|&k| svd.s[k] >= cutoff && svd.s[k] > 0.0).collect();
    let mut c = vec![Complex64::default(); a.ncols()];
    for &k in &retained {
        let uk = svd.u.col(k);
        let proj: Complex64 = (0..uk.nrows()).map(|i| uk[i].conj() * b[i]).sum::<Complex64>() / svd.s[k];
        let vk = svd.v.col(k);
        for (j, cj) in c.iter_mut().enumerate() {
            *cj += vk[j] * proj;
        }
    }
    let ac = crate::sampling::matvec(a, &c);
    let residual_norm = ac.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    Ok(RegularizedSolution {
        coefficient_norm: norm(&c),
        coefficients: c,
        residual_norm,
        epsilon: eps,
        singular_values: svd.s,
        retained_rank: retained.len(),
    })
}

/// A positive diagonal scaling `D` of the unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalWeight(Vec<f64>);

impl DiagonalWeight {
    pub fn new(diagonal: Vec<f64>) -> Result<Self> {
        match diagonal.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            Some(bad) => Err(Error::InvalidParameter(format!("weight entry {bad} must be positive and finite"))),
            None => Ok(Self(diagonal)),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// `(10⁻⁴ + k + k² + k³)⁻¹` for each element degree `k`.
    pub fn cubic_decay(degrees: &[f64]) -> Self {
        Self(degrees.iter().map(|&k| 1.0 / (1e-4 + k + k * k + k * k * k)).collect())
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `d_n = n^{-α}` for `n = 1, …, N`.
pub fn algebraic_weight(n: usize, alpha: f64) -> Result<DiagonalWeight> {
    if n == 0 || !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("algebraic weight needs N >= 1 and alpha >= 0, got {n}, {alpha}")));
    }
    DiagonalWeight::new((1..=n).map(|k| (k as f64).powf(-alpha)).collect())
}

fn scale_columns(a: &Mat<Complex64>, d: &[f64]) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * d[j])
}

/// Solves `A D y ≈ b` by TSVD and returns `c = D y`.
pub fn weighted_solve(system: &LeastSquaresSystem, weight: &DiagonalWeight, eps: f64) -> Result<RegularizedSolution> {
    if weight.len() != system.cols() {
        return Err(Error::LengthMismatch { expected: system.cols(), got: weight.len() });
    }
    solve_scaled(&system.matrix, &system.rhs, system.field, weight.diagonal(), eps)
}

fn solve_scaled(
    a: &Mat<Complex64>,
    b: &[Complex64],
    field: ScalarField,
    d: &[f64],
    eps: f64,
) -> Result<RegularizedSolution> {
    let scaled = scale_columns(a, d);
    let mut sol = solve_matrix(&scaled, b, field, Threshold::Absolute(eps))?;
    for (c, &w) in sol.coefficients.iter_mut().zip(d) {
        *c *= w;
    }
    sol.coefficient_norm = norm(&sol.coefficients);
    let ac = crate::sampling::matvec(a, &sol.coefficients);
    sol.residual_norm = ac.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    Ok(sol)
}

/// Incrementally weighted least squares.
///
/// `systems[i]` must have `i + 1` columns. The first system is solved as is;
/// system `i` is then solved with column weights `(‖b‖, e₁, …, e_{i-1})`,
/// where `e_j` is the residual of step `j` and `‖b‖` the norm of the final
/// right-hand side. The result is `D_N y_N` for the last system. Residuals
/// need not decrease; zero residuals give zero weights, which the
/// truncation then discards.
pub fn incremental_weighted_solve(systems: &[LeastSquaresSystem], eps: f64) -> Result<RegularizedSolution> {
    let Some(last) = systems.last() else {
        return Err(Error::InvalidParameter("incremental solve needs at least one system".into()));
    };
    for (i, s) in systems.iter().enumerate() {
        if s.cols() != i + 1 {
            return Err(Error::DescriptorMismatch(format!("system {} has {} columns, expected {}", i + 1, s.cols(), i + 1)));
        }
    }
    let b_norm = last.rhs_norm();
    let first = tsvd_solve(&systems[0], eps)?;
    if systems.len() == 1 {
        return Ok(first);
    }
    let mut weights = vec![b_norm, first.residual_norm];
    let mut solution = first;
    for system in &systems[1..] {
        solution = solve_scaled(&system.matrix, &system.rhs, system.field, &weights[..system.cols()], eps)?;
        weights.push(solution.residual_norm);
    }
    Ok(solution)
}

/// [`incremental_weighted_solve`] on the column prefixes of one system, so
/// every step shares the sample points of the final truncation.
pub fn incremental_weighted_solve_nested(system: &LeastSquaresSystem, eps: f64) -> Result<RegularizedSolution> {
    let systems = (1..=system.cols()).map(|i| system.leading_columns(i)).collect::<Result<Vec<_>>>()?;
    incremental_weighted_solve(&systems, eps)
}
