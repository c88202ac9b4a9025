//! Scalar traits shared by the polynomial, form and matrix code.
//!
//! Everything algebraic in this crate is written against [`Ring`] (and
//! [`Field`] where division is needed). Exact decisions run over
//! [`Rational`] or [`crate::numfield::NfElem`]; certified numerics run over
//! [`crate::interval::ComplexInterval`]; `f32`/`f64` and `Complex<f64>` are
//! supported for quick floating-point evaluation and root seeding.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational numbers.
pub type Rational = BigRational;

/// Commutative ring with unit. Operations are by value; callers clone.
pub trait Ring:
    Clone
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Image of a rational number under the canonical embedding.
    fn from_rational(q: &Rational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn pow_u32(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// A ring in which every nonzero element is invertible and equality is decidable.
pub trait Field: Ring + Div<Output = Self> + PartialEq {
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Ring for BigRational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}
impl Field for BigRational {}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Ring for $t {
            fn from_rational(q: &Rational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }
        }
        impl Field for $t {}
    };
}
float_scalar!(f32);
float_scalar!(f64);

impl<T> Ring for Complex<T>
where
    T: Ring + num_traits::Num,
{
    fn from_rational(q: &Rational) -> Self {
        Complex::new(T::from_rational(q), T::zero())
    }
}

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for integers as rationals.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Canonical `p/q` text (`p` alone when `q = 1`).
pub fn rational_to_string(q: &Rational) -> String {
    q.to_string()
}

/// Parses `p`, `-p` or `p/q`; rejects zero denominators.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}
