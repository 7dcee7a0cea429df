//! Scalar abstraction underlying every numeric kernel in the crate.
//!
//! [`Real`] bundles the `num-traits` capabilities the solvers need (IEEE
//! floating point, literal conversion, assignment operators, formatting) so
//! that each algorithm is written once and instantiated at `f32` or `f64`.
//! A blanket implementation covers both; downstream code should never need
//! to implement the trait by hand.
//!
//! Conversion helpers deliberately panic on failure: every scalar used here
//! round-trips through `f64`, and a failed conversion indicates a logic error
//! rather than a recoverable condition.
//!
//! # Example
//!
//! ```
//! use fpflux_core::scalar::Real;
//!
//! fn half_sum<T: Real>(a: T, b: T) -> T {
//!     (a + b) / T::of(2.0)
//! }
//!
//! approx::assert_abs_diff_eq!(half_sum(1.0f64, 2.0), 1.5);
//! approx::assert_abs_diff_eq!(half_sum(1.0f32, 2.0), 1.5f32);
//! ```

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};

// ============================================================================
// The Real trait
// ============================================================================

/// Real scalar usable in every solver of this crate.
///
/// The supertraits are the intersection of what the linear algebra,
/// quadrature, and sampling layers require; `Send + Sync + 'static` keeps
/// scalar-generic containers usable across threads.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Signed
    + Sum
    + Product
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`, rounding if necessary.
    ///
    /// Named for call-site brevity: `T::of(0.25)`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert into a Real scalar")
    }

    /// Converts `self` to `f64`, widening losslessly for `f32`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real scalar must convert into f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Signed
        + Sum
        + Product
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_mean<T: Real>(xs: &[T]) -> T {
        let n = T::of(xs.len() as f64);
        xs.iter().copied().sum::<T>() / n
    }

    #[test]
    fn blanket_impl_covers_both_widths() {
        approx::assert_abs_diff_eq!(generic_mean(&[1.0f64, 2.0, 3.0]), 2.0);
        approx::assert_abs_diff_eq!(generic_mean(&[1.0f32, 2.0, 3.0]), 2.0f32);
    }

    #[test]
    fn conversions_round_trip() {
        let x = f64::of(0.1);
        approx::assert_abs_diff_eq!(x.as_f64(), 0.1);
        let y = f32::of(0.5);
        approx::assert_abs_diff_eq!(y.as_f64(), 0.5);
    }

    #[test]
    fn float_constants_available() {
        approx::assert_abs_diff_eq!(f64::PI(), std::f64::consts::PI);
    }
}
