//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All algorithms are written against [`Scalar`]. Exact results (equality of
//! envelopes, exact zeros of gadget path costs) need an exact field such as
//! [`crate::Rational`]; the float impls are provided for quick plotting and
//! exploratory work where rounding is acceptable.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An ordered field element.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive {
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type represents small integers")
    }

    /// Arithmetic mean of two values.
    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / Self::from_int(2)
    }
}

impl<T> Scalar for T where T: Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn midpoint_is_exact_for_rationals() {
        let a = Rational::new(1.into(), 3.into());
        let b = Rational::new(2.into(), 3.into());
        assert_eq!(Rational::midpoint(&a, &b), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn floats_are_scalars() {
        assert_eq!(<f64 as Scalar>::midpoint(&1.0, &2.0), 1.5);
        assert_eq!(f32::from_int(3), 3.0);
    }
}
