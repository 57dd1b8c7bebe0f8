//! Scalar abstraction for the numeric kernels.

use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the numeric kernels are generic over: f32 or f64.
pub trait Scalar: Float + FromPrimitive + Sum {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossless-enough conversion from a count; panics only for counts no
/// float type can hold, which cannot occur for the string lengths in use.
pub(crate) fn from_usize<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("count representable as scalar")
}

pub(crate) fn from_f64<F: Scalar>(v: f64) -> F {
    F::from_f64(v).expect("f64 representable as scalar")
}
