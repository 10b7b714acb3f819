//! Numeric abstraction shared by the float and exact code paths.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Field operations plus the tolerances the solvers need.
///
/// Exact types report zero tolerances, so every comparison in generic code
/// degenerates to an exact one.
pub trait Scalar:
    num_traits::Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const EXACT: bool;

    fn of_f64(x: f64) -> Self;
    fn as_f64(&self) -> f64;
    fn of_i64(x: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn floor_val(&self) -> Self;
    fn ceil_val(&self) -> Self;

    /// Primal feasibility tolerance.
    fn feas_tol() -> Self;
    /// Reduced cost tolerance.
    fn opt_tol() -> Self;
    /// Smallest admissible pivot magnitude.
    fn pivot_tol() -> Self;
    /// Threshold below which a value counts as zero outside the simplex.
    fn zero_tol() -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_tol()
    }

    fn max_val(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_val(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn of_f64(x: f64) -> Self {
        x
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn of_i64(x: i64) -> Self {
        x as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn floor_val(&self) -> Self {
        self.floor()
    }
    fn ceil_val(&self) -> Self {
        self.ceil()
    }
    fn feas_tol() -> Self {
        1e-9
    }
    fn opt_tol() -> Self {
        1e-7
    }
    fn pivot_tol() -> Self {
        1e-10
    }
    fn zero_tol() -> Self {
        1e-9
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    /// Exact binary expansion of the float; non-finite input maps to zero.
    fn of_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Zero::zero)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn of_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn floor_val(&self) -> Self {
        self.floor()
    }
    fn ceil_val(&self) -> Self {
        self.ceil()
    }
    fn feas_tol() -> Self {
        Zero::zero()
    }
    fn opt_tol() -> Self {
        Zero::zero()
    }
    fn pivot_tol() -> Self {
        Zero::zero()
    }
    fn zero_tol() -> Self {
        Zero::zero()
    }
}

/// Shorthand for `p/q` rationals in tests and built-in data.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

pub fn int(x: i64) -> Rational {
    Rational::of_i64(x)
}

/// Converts a float vector into exact rationals.
pub fn to_rational(v: &[f64]) -> Vec<Rational> {
    v.iter().map(|x| Rational::of_f64(*x)).collect()
}

pub fn to_float<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Formats exact values as `p/q` and floats with six decimals.
pub fn fmt_value<T: Scalar>(x: &T) -> String {
    if T::EXACT {
        format!("{}", x)
    } else {
        let v = x.as_f64();
        if v == v.round() && v.abs() < 1e15 {
            format!("{}", v as i64)
        } else {
            format!("{:.6}", v)
        }
    }
}

pub fn fmt_vector<T: Scalar>(v: &[T]) -> String {
    v.iter().map(fmt_value).collect::<Vec<_>>().join(" ")
}

/// Integer value of an exact integral rational, if it fits in `i64`.
pub fn as_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn rational_from_u64_fraction(k: u64, bits: u32) -> Rational {
    BigRational::new(BigInt::from(k), BigInt::one() << bits)
}

pub fn from_usize<T: Scalar>(x: usize) -> T {
    T::of_i64(i64::from_usize(x).expect("index fits in i64"))
}
