//! Real scalar fields the coefficient algebra is generic over.
//!
//! Coefficients are `Complex<S>` where `S` is one of `f32`, `f64` or
//! [`BigRational`]. The float types drive the numeric paths; the rational
//! type makes exact identities (Leibniz composition, extraction
//! cancellation) checkable without rounding.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Num, ToPrimitive, Zero};

/// Coefficient magnitudes below this are treated as structural zeros.
pub const NEGLIGIBLE: f64 = 1e-300;

pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Nearest representable value (exact for the rational field).
    fn from_f64_lossy(x: f64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn from_rational(r: &BigRational) -> Self;

    fn is_finite_value(&self) -> bool;

    /// True when the value should be dropped from a sparse coefficient map.
    fn is_negligible(&self) -> bool;

    fn from_biguint(n: &BigUint) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n.clone())))
    }

    fn from_usize(n: usize) -> Self {
        Self::from_biguint(&BigUint::from(n))
    }
}

/// Scalars with transcendental functions; needed where a symbol is built
/// from `exp`, `sin` or `cos` (the Schrödinger prefactor).
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64_lossy(x: f64) -> Self {
                x as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn is_negligible(&self) -> bool {
                let a = self.abs() as f64;
                a < NEGLIGIBLE || (*self == 0.0)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

pub(crate) fn complex_is_negligible<S: Scalar>(c: &Complex<S>) -> bool {
    c.re.is_negligible() && c.im.is_negligible()
}

pub(crate) fn complex_is_finite<S: Scalar>(c: &Complex<S>) -> bool {
    c.re.is_finite_value() && c.im.is_finite_value()
}

/// |c| evaluated in double precision.
pub fn complex_abs<S: Scalar>(c: &Complex<S>) -> f64 {
    c.re.to_f64_lossy().hypot(c.im.to_f64_lossy())
}

pub fn complex_to_f64<S: Scalar>(c: &Complex<S>) -> Complex<f64> {
    Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy())
}

pub fn complex_from_f64<S: Scalar>(c: Complex<f64>) -> Complex<S> {
    Complex::new(S::from_f64_lossy(c.re), S::from_f64_lossy(c.im))
}
