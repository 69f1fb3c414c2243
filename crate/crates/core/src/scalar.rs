//! Scalar abstraction for edge weights, distances and coordinates.

use std::cmp::Ordering;
use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as an edge weight.
///
/// Everything in the crate is generic over this trait. `f64` is the default
/// used by the type aliases at the crate root; `f32` halves the memory of
/// embeddings and pivot tables at the cost of precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + FromStr + Default + Send + Sync + 'static
{
    /// Significant decimal digits needed for an exact text round trip.
    const ROUND_TRIP_DIGITS: usize;

    /// Total order consistent with IEEE `totalOrder`.
    fn total_order(&self, other: &Self) -> Ordering;

    /// Lossy conversion from `f64`, used for tolerances and constants.
    fn of(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

macro_rules! impl_scalar {
    ($t:ty, $digits:expr) => {
        impl Scalar for $t {
            const ROUND_TRIP_DIGITS: usize = $digits;

            #[inline]
            fn total_order(&self, other: &Self) -> Ordering {
                self.total_cmp(other)
            }
        }
    };
}

impl_scalar!(f32, 9);
impl_scalar!(f64, 17);

/// Writes `value` with [`Scalar::ROUND_TRIP_DIGITS`] significant digits.
pub fn format_exact<S: Scalar>(value: S) -> String {
    format!("{:.*e}", S::ROUND_TRIP_DIGITS - 1, value)
}
