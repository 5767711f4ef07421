//! Numeric backbone shared by every module.
//!
//! All lattice and decision computations are written against [`Scalar`], so
//! the same code runs on `f64` (the default), `f32`, and exact rationals.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A real-like number usable as a utility, probability or capacity value.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance used for comparisons between computed values.
    fn comparison_tol() -> Self;

    /// Tighter tolerance for validity checks (grounded, normalized, sums to one).
    fn validity_tol() -> Self;

    /// Lossy conversion from `f64`. Panics only on non-finite input.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("cannot represent {x} as a scalar"))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize fits the scalar type")
    }

    /// `self` raised to a real exponent. Exact types round through `f64`.
    fn powf(self, exponent: f64) -> Self {
        Self::from_f64_lossy(self.to_f64_lossy().powf(exponent))
    }

    fn is_finite_value(self) -> bool {
        true
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl Scalar for f64 {
    fn comparison_tol() -> Self {
        1e-9
    }
    fn validity_tol() -> Self {
        1e-12
    }
    fn powf(self, exponent: f64) -> Self {
        f64::powf(self, exponent)
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn comparison_tol() -> Self {
        1e-4
    }
    fn validity_tol() -> Self {
        1e-5
    }
    fn powf(self, exponent: f64) -> Self {
        f32::powf(self, exponent as f32)
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational64 {
    fn comparison_tol() -> Self {
        Rational64::new_raw(0, 1)
    }
    fn validity_tol() -> Self {
        Rational64::new_raw(0, 1)
    }
}

/// `|a - b| <= tol`.
pub fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol
}

/// Sign of `x` with a dead zone of width `tol` around zero.
pub fn sign_tol<T: Scalar>(x: T, tol: T) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

pub fn max_of<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    values.into_iter().fold(None, |acc, v| match acc {
        Some(m) if m >= v => Some(m),
        _ => Some(v),
    })
}

pub fn min_of<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<T> {
    values.into_iter().fold(None, |acc, v| match acc {
        Some(m) if m <= v => Some(m),
        _ => Some(v),
    })
}

pub fn sum_of<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}
