//! Scalar abstraction for the closed-form formulas and fits.

use num_traits::{Float as NumFloat, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point type usable by the analysis formulas.
pub trait Float:
    NumFloat + FloatConst + FromPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literal constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Conversion of a small count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Float for f32 {}
impl Float for f64 {}
