//! Scalar abstraction: every numerical routine in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
///
/// Implemented for `f32` and `f64`. The bounds cover transcendental functions,
/// float constants, conversion from literals, compound assignment, summation,
/// and thread safety for parallel ensembles.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics if the value is not representable.
    /// Intended for compile-time constants, not data.
    fn val(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in this scalar type")
    }

    /// Converts a `usize` count exactly enough for loop arithmetic.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in this scalar type")
    }

    /// Lossy widening to `f64`, used only for error reporting.
    fn approx_f64(self) -> f64;
}

impl Real for f32 {
    fn approx_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn approx_f64(self) -> f64 {
        self
    }
}
