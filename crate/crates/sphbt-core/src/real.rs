//! Scalar abstraction: the numerical core is generic over the floating point
//! type via `num_traits`, with `f64` aliases exported at the crate root.

use num_traits::{Float, FloatConst, FromPrimitive};
use rustdct::DctNum;

/// Floating point scalar for all transforms and solvers.
///
/// The bound combines `num_traits::Float` (elementary functions),
/// `FloatConst` (π) and `rustdct::DctNum` (trigonometric transform planning).
/// Implemented for `f32` and `f64`; accuracy statements in this crate are
/// calibrated for `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + DctNum {
    /// Conversion from an `f64` literal or intermediate.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal converts to scalar")
    }

    /// Conversion from an index or count.
    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count converts to scalar")
    }

    /// Conversion from a signed integer.
    #[inline]
    fn of_i64(v: i64) -> Self {
        Self::from_i64(v).expect("integer converts to scalar")
    }

    /// Absolute value. Named to avoid the `Float::abs` / `Signed::abs`
    /// method ambiguity introduced by the combined bounds.
    #[inline]
    fn fabs(self) -> Self {
        Float::abs(self)
    }
}

impl Real for f32 {}
impl Real for f64 {}
