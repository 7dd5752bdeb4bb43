//! Scalar abstraction: the core math is generic over `f32`/`f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must convert")
    }

    /// Lift a mode or pair count into `Self`.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| Self::of(n as f64))
    }
}

impl Real for f32 {}
impl Real for f64 {}
