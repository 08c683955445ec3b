//! Scalar abstraction for the numeric layers.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by embeddings, similarity search, and the
/// lexical metrics. Implemented by `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + AddAssign + Sum + Default + Debug + Send + Sync + 'static
{
    /// Lossless-enough conversion from f64 literals and counters.
    fn from_f64_lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to scalar")
    }

    fn from_f32_lit(x: f32) -> Self {
        Self::from_f32(x).expect("f32 converts to scalar")
    }

    /// Conversion from a count. Panics only if the count overflows the type,
    /// which cannot happen for the corpus sizes this crate targets.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
