//! Scalar abstraction for the numeric core.
//!
//! Counting, rates, regression and significance math are generic over a
//! floating scalar so the same code runs in `f32` or `f64`. The pipeline
//! itself uses the `f64` aliases exported from the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar used throughout the numeric core.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `usize` counts.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }

    /// Lossy conversion from `f64` constants.
    fn from_f64_c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable as scalar")
    }

    /// Conversion into `f64` for reporting and distribution lookups.
    fn into_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}
