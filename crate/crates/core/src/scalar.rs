//! Floating point scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::distr::uniform::SampleUniform;

/// Real scalar used for profits, weights and all derived statistics: `f32` or `f64`.
///
/// `Display` must print the shortest decimal string that parses back to the
/// same value; the instance file format relies on it for bit-exact round trips.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + Display
    + Debug
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for literals and sampled values.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Scalar")
    }

    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn third<T: Scalar>() -> T {
        T::one() / T::of(3.0)
    }

    #[test]
    fn display_round_trips_shortest_repr() {
        for v in [0.1f64, 1.0 / 3.0, 2407.0, 1e-7, 123456.789] {
            let s = v.to_string();
            assert_eq!(s.parse::<f64>().unwrap(), v);
            assert!(!s.contains('e'), "{s}");
        }
        let t = third::<f32>();
        assert_eq!(t.to_string().parse::<f32>().unwrap(), t);
    }
}
