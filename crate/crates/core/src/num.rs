//! Scalar abstraction for ratios of counts.

use std::fmt::Debug;
use std::ops::{Add, Div};

use num_traits::{One, ToPrimitive, Zero};

use crate::Fraction;

/// A number type that can hold the ratio of two counts.
///
/// Implemented for `f32`, `f64` and [`Fraction`]. Only exact types give
/// reliable equality between ratios computed from different counts.
pub trait Scalar:
    Copy + Debug + PartialOrd + Zero + One + Add<Output = Self> + Div<Output = Self> + Send + Sync
{
    fn from_count(n: u64) -> Self;

    fn to_f64(self) -> f64;

    /// `num / den`, or zero when `den == 0`.
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Self::zero()
        } else {
            Self::from_count(num) / Self::from_count(den)
        }
    }
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Fraction {
    fn from_count(n: u64) -> Self {
        Fraction::from_integer(n)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Fraction::zero()
        } else {
            Fraction::new(num, den)
        }
    }
}

/// Arithmetic mean, zero for an empty input.
pub fn mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut n = 0u64;
    for v in values {
        sum = sum + v;
        n += 1;
    }
    if n == 0 {
        T::zero()
    } else {
        sum / T::from_count(n)
    }
}

/// Percentage with one decimal, as used in reports.
pub fn percent<T: Scalar>(value: T) -> String {
    format!("{:.1}", value.to_f64() * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_by_zero_is_zero() {
        assert_eq!(f64::ratio(3, 0), 0.0);
        assert_eq!(Fraction::ratio(3, 0), Fraction::zero());
    }

    #[test]
    fn fraction_ratio_is_exact() {
        assert_eq!(Fraction::ratio(2, 6), Fraction::new(1, 3));
        assert!(Fraction::ratio(1, 3) < Fraction::ratio(34, 100));
    }

    #[test]
    fn mean_over_scalars() {
        assert_eq!(mean([1.0f64, 2.0, 6.0]), 3.0);
        assert_eq!(
            mean([Fraction::new(1, 2), Fraction::new(1, 3)]),
            Fraction::new(5, 12)
        );
        assert_eq!(mean(Vec::<f32>::new()), 0.0);
    }

    #[test]
    fn percent_one_decimal() {
        assert_eq!(percent(Fraction::new(1, 3)), "33.3");
        assert_eq!(percent(1.0f32), "100.0");
    }
}
