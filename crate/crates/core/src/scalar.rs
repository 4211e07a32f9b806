//! Scalar abstractions shared by the numeric and the exact code paths.
//!
//! [`Real`] is the floating-point type the fitting and analysis code is
//! generic over (`f32` or `f64`). [`ShiftAdd`] is the much smaller contract
//! the evaluation engine needs: a value that can be added, negated and
//! scaled by a power of two. Floats and [`Dyadic`](crate::Dyadic) both
//! implement it, so the same shift-add kernels run either fast or exact.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Neg};

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive, Zero};

/// Floating-point scalar used for fitting, distortion scoring and analysis.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + ShiftAdd + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// `2^e`.
    fn exp2i(e: i32) -> Self {
        Self::lit(2.0).powi(e)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A value that supports the three operations of multiplierless arithmetic.
pub trait ShiftAdd: Clone + Zero + Add<Output = Self> + Neg<Output = Self> {
    /// Multiplies by `2^exp`.
    fn shift(&self, exp: i32) -> Self;
}

impl ShiftAdd for f64 {
    fn shift(&self, exp: i32) -> Self {
        self * 2f64.powi(exp)
    }
}

impl ShiftAdd for f32 {
    fn shift(&self, exp: i32) -> Self {
        self * 2f32.powi(exp)
    }
}
