//! Floating-point scalar abstraction.
//!
//! All numerical code in this crate is generic over [`Scalar`], a thin extension
//! of [`num_traits::Float`] that adds the conversions and marker bounds the
//! algorithms need. `f32` and `f64` implement it; the crate root exports
//! concrete `f64` type aliases for the common case.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar type usable throughout the crate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` constant, panicking only for values outside the
    /// representable range (never the case for the literals used here).
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Lossy widening to `f64` for reporting.
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand used pervasively for `f64` literals in generic code.
#[inline]
pub fn s<T: Scalar>(v: f64) -> T {
    T::from_f64_c(v)
}
