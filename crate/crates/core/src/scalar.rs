//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by the metric and statistics code.
///
/// Implemented for `f32` and `f64`. Everything that reports to users goes
/// through the `f64` aliases at the crate root; `f32` is kept working so the
/// numerics stay honest about the precision they actually need.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static {
    /// Machine epsilon scaled for iterative special-function convergence.
    fn tolerance() -> Self {
        Self::epsilon() * Self::from_f64(4.0).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossless-enough conversion of a literal into `T`.
#[inline]
pub fn lit<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().copied().sum::<T>() / count(values.len()))
}
