//! Infinite-order differential operators on spaces of entire functions of
//! finite order.
//!
//! Functions are truncated Taylor expansions ([`TaylorPoly`]); operators are
//! coefficient families `{a_α}` ([`OperatorSymbol`]) that can be applied,
//! added, composed, classified by coefficient growth and recovered from their
//! action on monomials. The algebra is generic over the real field through
//! [`Scalar`]: `f32`, `f64`, or exact [`BigRational`].

pub mod builtin;
pub mod error;
pub mod extraction;
pub mod growth;
pub mod json;
pub mod multiindex;
pub mod operator;
pub mod scalar;
pub mod series;

pub use num_complex::{Complex, Complex32, Complex64};
pub use num_rational::BigRational;

pub use error::{Error, Result};
pub use growth::{ClassVerdict, Condition, GrowthParams, Mode, NormBracket, Status};
pub use multiindex::MultiIndex;
pub use operator::{ApplyReport, OperatorSymbol};
pub use scalar::{FloatScalar, Scalar};
pub use series::TaylorPoly;

pub type TaylorPolyF64 = TaylorPoly<f64>;
pub type TaylorPolyF32 = TaylorPoly<f32>;
pub type TaylorPolyQ = TaylorPoly<BigRational>;

pub type OperatorSymbolF64 = OperatorSymbol<f64>;
pub type OperatorSymbolF32 = OperatorSymbol<f32>;
pub type OperatorSymbolQ = OperatorSymbol<BigRational>;

/// Exact complex rationals.
pub type ComplexQ = Complex<BigRational>;
