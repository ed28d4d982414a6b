//! Scalar fields the library computes over: real or complex double precision.

use nalgebra::ComplexField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A scalar field element: `f64` for the real case, [`Complex64`] for the complex case.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    const IS_COMPLEX: bool;

    fn lift(x: f64) -> Self {
        Self::from_real(x)
    }

    fn re(self) -> f64 {
        self.real()
    }

    fn im(self) -> f64 {
        self.imaginary()
    }

    /// `true` when the value is a (numerically exact) positive real.
    fn is_positive_real(self) -> bool {
        self.im() == 0.0 && self.re() > 0.0
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
}

/// Runtime choice of scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}
