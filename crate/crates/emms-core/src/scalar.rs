//! Scalar-mode abstraction.
//!
//! Every kernel in the crate is generic over [`Scalar`], so the same code
//! runs in double-precision complex (`float` mode) and Q2.30 complex
//! (`fixed` mode). The fixed implementation saturates and rounds exactly
//! like [`crate::fixedpoint`]; the float implementation is plain IEEE f64.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fixedpoint::FixedComplex;

/// Which scalar representation a run uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Float,
    Fixed,
}

impl std::fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarMode::Float => write!(f, "float"),
            ScalarMode::Fixed => write!(f, "fixed"),
        }
    }
}

pub trait Scalar: Copy + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    const MODE: ScalarMode;

    fn zero() -> Self;
    fn one() -> Self;
    /// Converts a complex value into this scalar mode. Fixed mode rounds to
    /// the Q2.30 grid and saturates out-of-range components.
    fn from_complex(re: f64, im: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn mul(self, rhs: Self) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn conj(self) -> Self;
    fn is_zero(self) -> bool;
}

impl Scalar for Complex64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_complex(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn to_complex(self) -> Complex64 {
        self
    }

    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }

    fn add(self, rhs: Self) -> Self {
        self + rhs
    }

    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Scalar for FixedComplex {
    const MODE: ScalarMode = ScalarMode::Fixed;

    fn zero() -> Self {
        FixedComplex::ZERO
    }

    fn one() -> Self {
        FixedComplex::ONE
    }

    fn from_complex(re: f64, im: f64) -> Self {
        FixedComplex::encode_saturating(re, im)
    }

    fn to_complex(self) -> Complex64 {
        let (re, im) = self.decode();
        Complex64::new(re, im)
    }

    fn mul(self, rhs: Self) -> Self {
        FixedComplex::mul(self, rhs)
    }

    fn add(self, rhs: Self) -> Self {
        FixedComplex::add(self, rhs)
    }

    fn conj(self) -> Self {
        FixedComplex::conj(self)
    }

    fn is_zero(self) -> bool {
        FixedComplex::is_zero(self)
    }
}
