//! Target functions and the built-in test functions used by the experiments.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

type Eval = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A pointwise function `f : Ω → ℂ`, cheap to clone and share across threads.
#[derive(Clone)]
pub struct Function {
    label: String,
    f: Eval,
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Function({})", self.label)
    }
}

impl Function {
    pub fn real<F>(label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.to_string(), f: Arc::new(move |x| Complex64::new(f(x), 0.0)) }
    }

    pub fn complex<F>(label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self { label: label.to_string(), f: Arc::new(f) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let f = self.f.clone();
        Self { label: format!("{alpha}*({})", self.label), f: Arc::new(move |x| f(x) * alpha) }
    }

    pub fn plus(&self, other: &Function) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        Self { label: format!("{} + {}", self.label, other.label), f: Arc::new(move |x| f(x) + g(x)) }
    }

    pub fn zero() -> Self {
        Self::real("0", |_| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::real(&format!("{c}"), move |_| c)
    }

    pub fn identity() -> Self {
        Self::real("x", |x| x[0])
    }

    pub fn exp() -> Self {
        Self::real("exp(x)", |x| x[0].exp())
    }

    pub fn cos(p: f64) -> Self {
        Self::real(&format!("cos({p}x)"), move |x| (p * x[0]).cos())
    }

    /// `exp(cos(8πx))`.
    pub fn exp_cos_8pi() -> Self {
        Self::real("exp(cos(8*pi*x))", |x| (8.0 * PI * x[0]).cos().exp())
    }

    /// `exp(cos(5x))`.
    pub fn exp_cos_5() -> Self {
        Self::real("exp(cos(5x))", |x| (5.0 * x[0]).cos().exp())
    }

    /// `eˣ + σ cos(2000πx)`: a smooth function polluted by high-frequency noise.
    pub fn exp_with_noise(sigma: f64) -> Self {
        Self::real(&format!("exp(x) + {sigma}*cos(2000*pi*x)"), move |x| {
            x[0].exp() + sigma * (2000.0 * PI * x[0]).cos()
        })
    }

    /// `cos(pπ(x+y)) + √(x²+y²) sin(1 + pπ(x+y))`, with a point singularity at the origin.
    pub fn singular_2d(p: f64) -> Self {
        Self::real(&format!("singular2d(p={p})"), move |x| {
            let s = p * PI * (x[0] + x[1]);
            s.cos() + (x[0] * x[0] + x[1] * x[1]).sqrt() * (1.0 + s).sin()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinators() {
        let f = Function::exp().scaled(2.0).plus(&Function::constant(1.0));
        assert!((f.eval(&[0.0]).re - 3.0).abs() < 1e-15);
        assert_eq!(Function::zero().eval(&[1.0]), Complex64::default());
    }

    #[test]
    fn singular_2d_at_origin() {
        let f = Function::singular_2d(1.0);
        assert!((f.eval(&[0.0, 0.0]).re - 1.0).abs() < 1e-15);
    }
}
