use std::sync::Arc;

use faer::Mat;
use framefit::sampling::generate_scheme;
use framefit::{tsvd_solve, Descriptor, Domain, LeastSquaresSystem, PointKind, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;

fn system(rows: usize, cols: usize, entries: &[f64], rhs: &[f64]) -> LeastSquaresSystem {
    let scheme = generate_scheme(&Domain::interval(0.0, 1.0).unwrap(), rows, PointKind::Equispaced, 0).unwrap();
    LeastSquaresSystem {
        matrix: Mat::from_fn(rows, cols, |i, j| Complex64::new(entries[i * cols + j], 0.0)),
        rhs: rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        scheme: Arc::new(scheme),
        descriptor: Descriptor::Flat(cols),
        field: ScalarField::Real,
    }
}

fn random_system() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
    (1usize..8, 0usize..6).prop_flat_map(|(cols, extra)| {
        let rows = cols + extra;
        (
            Just(rows),
            Just(cols),
            prop::collection::vec(-1.0f64..1.0, rows * cols),
            prop::collection::vec(-1.0f64..1.0, rows),
        )
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn coefficient_norm_bounded_by_rhs_over_epsilon((m, n, a, b) in random_system(), eps in 1e-6f64..1.0) {
        let s = system(m, n, &a, &b);
        let sol = tsvd_solve(&s, eps).unwrap();
        prop_assert!(sol.coefficient_norm <= s.rhs_norm() / eps * (1.0 + 1e-10));
        prop_assert!(sol.residual_norm <= s.rhs_norm() * (1.0 + 1e-10));
    }

    #[test]
    fn rank_and_residual_monotone_in_epsilon((m, n, a, b) in random_system(), e1 in 1e-6f64..1.0, e2 in 1e-6f64..1.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let s = system(m, n, &a, &b);
        let (small, large) = (tsvd_solve(&s, lo).unwrap(), tsvd_solve(&s, hi).unwrap());
        prop_assert!(large.retained_rank <= small.retained_rank);
        prop_assert!(large.residual_norm >= small.residual_norm - 1e-12);
    }

    #[test]
    fn zero_column_gets_zero_coefficient((m, n, a, b) in random_system(), eps in 1e-6f64..0.5) {
        let mut padded = Vec::with_capacity(m * (n + 1));
        for row in a.chunks(n) {
            padded.extend_from_slice(row);
            padded.push(0.0);
        }
        let base = tsvd_solve(&system(m, n, &a, &b), eps).unwrap();
        let more = tsvd_solve(&system(m, n + 1, &padded, &b), eps);
        // more columns than rows is rejected
        if m < n + 1 {
            prop_assert!(more.is_err());
        } else {
            let more = more.unwrap();
            prop_assert_eq!(more.retained_rank, base.retained_rank);
            prop_assert!(more.coefficients[n].norm() < 1e-12);
            let diff: Vec<Complex64> = base.coefficients.iter().zip(&more.coefficients).map(|(x, y)| x - y).collect();
            prop_assert!(norm(&diff) <= 1e-9 * (1.0 + base.coefficient_norm));
        }
    }

    /// Duplicating a column splits its coefficient evenly between the copies.
    #[test]
    fn minimal_norm_on_duplicated_column((m, n, a, b) in random_system(), eps in 1e-8f64..1e-3) {
        prop_assume!(m > n);
        let mut dup = Vec::with_capacity(m * (n + 1));
        for row in a.chunks(n) {
            dup.extend_from_slice(row);
            dup.push(row[0]);
        }
        let sol = tsvd_solve(&system(m, n + 1, &dup, &b), eps).unwrap();
        let (c0, cn) = (sol.coefficients[0], sol.coefficients[n]);
        prop_assert!((c0 - cn).norm() <= 1e-8 * (1.0 + sol.coefficient_norm));
    }

    #[test]
    fn linear_in_rhs((m, n, a, b) in random_system(), alpha in -1e3f64..1e3) {
        let scaled: Vec<f64> = b.iter().map(|v| alpha * v).collect();
        let x = tsvd_solve(&system(m, n, &a, &b), 1e-8).unwrap();
        let y = tsvd_solve(&system(m, n, &a, &scaled), 1e-8).unwrap();
        for (cx, cy) in x.coefficients.iter().zip(&y.coefficients) {
            prop_assert!((cx * alpha - cy).norm() <= 1e-8 * (1.0 + alpha.abs() * x.coefficient_norm));
        }
    }
}
