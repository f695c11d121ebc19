//! Scalar abstraction: the whole library is generic over the floating point
//! type through [`Scalar`], with `f64` aliases exported at the crate root.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// A real scalar usable everywhere in the library: `f32` or `f64`.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T: RealField + Copy + FromPrimitive + ToPrimitive> Scalar for T {}

/// Shorthand for pulling an `f64` constant into the working scalar type.
#[inline]
pub fn real<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("constant representable in scalar type")
}

/// Lossy conversion back to `f64`, used for diagnostics and serialization.
#[inline]
pub fn to_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().expect("scalar convertible to f64")
}
