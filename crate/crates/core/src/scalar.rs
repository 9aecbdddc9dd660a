use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar used for positions, distances and field values: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Max of a slice, ignoring NaN. `None` for an empty slice.
pub(crate) fn max_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> Option<T> {
    xs.into_iter().fold(None, |acc, x| match acc {
        None => Some(x),
        Some(a) => Some(a.max(x)),
    })
}

pub(crate) fn min_of<T: Scalar>(xs: impl IntoIterator<Item = T>) -> Option<T> {
    xs.into_iter().fold(None, |acc, x| match acc {
        None => Some(x),
        Some(a) => Some(a.min(x)),
    })
}
