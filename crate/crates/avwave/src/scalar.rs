//! Floating-point scalar abstraction.

use std::fmt::{Debug, Display};

use num_traits::{Euclid, Float, FloatConst, FromPrimitive};

/// Scalar type the numeric routines are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Euclid + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
