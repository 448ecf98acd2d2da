use num_complex::Complex64;

use crate::dictionary::{Descriptor, Dictionary};
use crate::error::{Error, Result};

/// A finite expansion `f_N = Σ cₖ φₖ` over a truncated dictionary.
#[derive(Clone, Debug)]
pub struct Approximant {
    dictionary: Dictionary,
    descriptor: Descriptor,
    coefficients: Vec<Complex64>,
}

impl Approximant {
    pub fn new(dictionary: Dictionary, descriptor: Descriptor, coefficients: Vec<Complex64>) -> Result<Self> {
        dictionary.check(&descriptor)?;
        if coefficients.len() != descriptor.total() {
            return Err(Error::LengthMismatch { expected: descriptor.total(), got: coefficients.len() });
        }
        Ok(Self { dictionary, descriptor, coefficients })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        self.dictionary.eval_expansion(&self.descriptor, &self.coefficients, x)
    }
}
