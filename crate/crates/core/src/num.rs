//! Scalar abstraction for edge weights.
//!
//! The sparsifiers store their own level weights as `f64` (they are products
//! `2^k * lambda`, exact in binary floating point), but every weight-function
//! computation that feeds a guarantee check (node sums, sizes, distance,
//! scale-down, maximality) is generic so that tests can replay it in exact
//! rational arithmetic.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A real-like number usable as an edge weight.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Absolute slack allowed in inequality checks.
    fn tolerance() -> Self;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `self <= other` up to [`Scalar::tolerance`].
    fn le_tol(self, other: Self) -> bool {
        self <= other + Self::tolerance()
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn sum_iter<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Ratio<i64> {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for Ratio<i128> {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

/// Sum helper for iterators over a [`Scalar`].
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    S::sum_iter(items.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn tolerance_is_exact_for_rationals() {
        let third = Rational64::new(1, 3);
        assert!((third + third + third).le_tol(Rational64::from_integer(1)));
        assert!(!(third + third + third + Rational64::new(1, 1_000_000))
            .le_tol(Rational64::from_integer(1)));
    }

    #[test]
    fn float_tolerance_absorbs_rounding() {
        let x = 0.1_f64 + 0.2;
        assert!(x.le_tol(0.3));
        assert!(!(0.3 + 1e-6).le_tol(0.3));
    }

    #[test]
    fn max_min_helpers() {
        assert_eq!(2.0_f64.max_of(3.0), 3.0);
        assert_eq!(Rational64::new(1, 2).min_of(Rational64::new(1, 3)), Rational64::new(1, 3));
    }
}
