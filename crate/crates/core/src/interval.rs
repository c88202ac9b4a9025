//! Closed intervals and complex boxes with rational endpoints.
//!
//! Arithmetic is exact on the endpoints; [`Interval::round_out`] coarsens
//! endpoints to a dyadic grid while keeping the enclosure valid.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    /// `[c - r, c + r]`
    pub fn around(c: &Rational, r: &Rational) -> Self {
        Interval::new(c - r, c + r)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    /// Largest absolute value attained.
    pub fn mag(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Outward rounding to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    /// Reciprocal when the interval excludes zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval::new(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
        )
    }
}

/// Largest multiple of `2^-bits` not above `x`.
pub fn floor_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << bits);
    (x * &scale).floor() / scale
}

/// Smallest multiple of `2^-bits` not below `x`.
pub fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << bits);
    (x * &scale).ceil() / scale
}

/// Nearest multiple of `2^-bits`.
pub fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << bits);
    (x * &scale).round() / scale
}

/// Upper bound for `sqrt(x)` on the `2^-bits` grid, `x >= 0`.
pub fn sqrt_upper(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (2 * bits);
    let scaled = (x * Rational::from_integer(scale)).ceil().to_integer();
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1;
    }
    Rational::new(r, BigInt::one() << bits)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.lo == self.hi && rhs.lo == rhs.hi {
            return Interval::point(self.lo * rhs.lo);
        }
        let p = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = p.iter().min().cloned().unwrap();
        let hi = p.iter().max().cloned().unwrap();
        Interval::new(lo, hi)
    }
}

impl Zero for Interval {
    fn zero() -> Self {
        Interval::point(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for Interval {
    fn one() -> Self {
        Interval::point(Rational::one())
    }
}

impl Ring for Interval {
    fn from_rational(q: &Rational) -> Self {
        Interval::point(q.clone())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Axis-aligned box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn point(re: Rational, im: Rational) -> Self {
        ComplexInterval::new(Interval::point(re), Interval::point(im))
    }

    pub fn real(x: Rational) -> Self {
        ComplexInterval::point(x, Rational::zero())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, other: &ComplexInterval) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains_point(&self, re: &Rational, im: &Rational) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn round_out(&self, bits: u32) -> Self {
        ComplexInterval::new(self.re.round_out(bits), self.im.round_out(bits))
    }

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self) -> Interval {
        let sq = |i: &Interval| {
            let m = i.clone() * i.clone();
            if i.contains_zero() {
                Interval::new(Rational::zero(), m.hi)
            } else {
                m
            }
        };
        sq(&self.re) + sq(&self.im)
    }

    pub fn conj(&self) -> Self {
        ComplexInterval::new(self.re.clone(), -self.im.clone())
    }

    /// Quotient when the divisor box excludes zero.
    pub fn checked_div(&self, rhs: &ComplexInterval) -> Option<Self> {
        let inv = rhs.norm_sqr().recip()?;
        let num = self.clone() * rhs.conj();
        Some(ComplexInterval::new(num.re * inv.clone(), num.im * inv))
    }

    /// Largest coordinate width.
    pub fn width(&self) -> Rational {
        self.re.width().max(self.im.width())
    }

    pub fn mid(&self) -> (Rational, Rational) {
        (self.re.mid(), self.im.mid())
    }
}

impl Add for ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, rhs: ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, rhs: ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ComplexInterval {
    type Output = ComplexInterval;
    fn neg(self) -> ComplexInterval {
        ComplexInterval::new(-self.re, -self.im)
    }
}

impl Mul for ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, rhs: ComplexInterval) -> ComplexInterval {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        ComplexInterval::new(re, im)
    }
}

impl Zero for ComplexInterval {
    fn zero() -> Self {
        ComplexInterval::new(Interval::zero(), Interval::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ComplexInterval {
    fn one() -> Self {
        ComplexInterval::new(Interval::one(), Interval::zero())
    }
}

impl Ring for ComplexInterval {
    fn from_rational(q: &Rational) -> Self {
        ComplexInterval::real(q.clone())
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+i{}", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn product_encloses_pointwise_products() {
        let a = Interval::new(rat(-1, 2), rat(3, 1));
        let b = Interval::new(rat(-2, 1), rat(1, 3));
        let p = a.clone() * b.clone();
        for x in [rat(-1, 2), rat(0, 1), rat(3, 1), rat(1, 7)] {
            for y in [rat(-2, 1), rat(1, 3), rat(-1, 5)] {
                assert!(p.contains(&(&x * &y)));
            }
        }
    }

    #[test]
    fn dyadic_rounding_is_outward() {
        let i = Interval::new(rat(1, 3), rat(2, 3)).round_out(4);
        assert!(i.lo <= rat(1, 3) && i.hi >= rat(2, 3));
        assert_eq!(i.lo, rat(5, 16));
        assert_eq!(i.hi, rat(11, 16));
    }

    #[test]
    fn sqrt_upper_bounds() {
        let r = sqrt_upper(&rat(2, 1), 20);
        assert!(&r * &r >= rat(2, 1));
        assert!(r < rat(14143, 10000));
        assert_eq!(sqrt_upper(&rat(9, 4), 3), rat(3, 2));
    }

    #[test]
    fn complex_division_encloses_quotient() {
        let z = ComplexInterval::point(rat(1, 1), rat(2, 1));
        let w = ComplexInterval::point(rat(0, 1), rat(1, 1));
        let q = z.checked_div(&w).unwrap();
        assert!(q.contains_point(&rat(2, 1), &rat(-1, 1)));
        assert!(z.checked_div(&ComplexInterval::zero()).is_none());
    }
}
