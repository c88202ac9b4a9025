//! The rational function field `Q(t)` and square-class reduction.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::{parse_rational, Field, Rational, Ring};

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly<Rational>,
    den: Poly<Rational>,
}

impl RationalFunction {
    pub fn new(num: Poly<Rational>, den: Poly<Rational>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::from_poly(Poly::zero());
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        let lc = den.lead();
        RationalFunction {
            num: num.scale(&lc.recip()),
            den: den.scale(&lc.recip()),
        }
    }

    pub fn from_poly(p: Poly<Rational>) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<Rational> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Rational> {
        &self.den
    }

    pub fn to_json(&self) -> RationalFunctionJson {
        let s = |p: &Poly<Rational>| {
            if p.is_zero() {
                vec!["0".to_string()]
            } else {
                p.coeffs().iter().map(|c| c.to_string()).collect()
            }
        };
        RationalFunctionJson {
            num: s(&self.num),
            den: s(&self.den),
        }
    }

    pub fn from_json(j: &RationalFunctionJson) -> Option<Self> {
        let p = |v: &[String]| -> Option<Poly<Rational>> {
            Some(Poly::new(
                v.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Option<Vec<_>>>()?,
            ))
        };
        let den = p(&j.den)?;
        if den.is_zero() {
            return None;
        }
        Some(RationalFunction::new(p(&j.num)?, den))
    }
}

/// Wire format: ascending coefficient strings of numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunctionJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl Add for RationalFunction {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den);
        }
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for RationalFunction {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for RationalFunction {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Mul for RationalFunction {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for RationalFunction {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.num.is_zero(), "division by zero rational function");
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl Ring for RationalFunction {
    fn from_rational(q: &Rational) -> Self {
        Self::from_poly(Poly::constant(q.clone()))
    }
}

impl Field for RationalFunction {}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Fields whose elements can be split as `x = mu * r^2` with `mu` a reduced
/// representative of the square class of `x`.
pub trait SquareClass: Field {
    /// `(mu, r)` with `self = mu * r^2`; `self` must be nonzero.
    fn square_class(&self) -> (Self, Self);

    fn is_square(&self) -> bool {
        self.is_zero() || self.square_class().0 == Self::one()
    }
}

/// Trial division bound for integer squarefree reduction.
const TRIAL_LIMIT: u64 = 1_000_000;

/// `(s, r)` with `n = s * r^2`. `s` is squarefree whenever every prime factor
/// of `n` above the trial bound occurs to a power at most 2 beyond one pair.
pub fn integer_square_class(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.is_zero());
    let sign = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let limit = m.cbrt().to_u64().unwrap_or(u64::MAX).min(TRIAL_LIMIT);
    let mut p = 2u64;
    while p <= limit {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            r *= &bp;
        }
        if e % 2 == 1 {
            s *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = m.sqrt();
    if &root * &root == m {
        r *= root;
    } else {
        s *= m;
    }
    (sign * s, r)
}

impl SquareClass for Rational {
    fn square_class(&self) -> (Self, Self) {
        let (s, r) = integer_square_class(&(self.numer() * self.denom()));
        (
            Rational::from_integer(s),
            Rational::new(r, self.denom().clone()),
        )
    }
}

impl SquareClass for RationalFunction {
    fn square_class(&self) -> (Self, Self) {
        let prod = &self.num * &self.den;
        let (lc, parts) = prod.squarefree_factors();
        let (ls, lr) = lc.square_class();
        let mut odd = Poly::constant(ls);
        let mut root = Poly::constant(lr);
        for (i, s) in parts.iter().enumerate() {
            let e = (i + 1) as u32;
            if e % 2 == 1 {
                odd = &odd * s;
            }
            root = &root * &s.pow(e / 2);
        }
        (
            RationalFunction::from_poly(odd),
            RationalFunction::new(root, self.den.clone()),
        )
    }
}

impl SquareClass for f64 {
    fn square_class(&self) -> (Self, Self) {
        (self.signum(), self.abs().sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(c: &[i64]) -> Poly<Rational> {
        Poly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn arithmetic_normalizes() {
        let a = RationalFunction::new(p(&[-1, 0, 1]), p(&[1, 1]));
        assert_eq!(a, RationalFunction::from_poly(p(&[-1, 1])));
        let t = RationalFunction::t();
        let inv = RationalFunction::one() / t.clone();
        assert_eq!(t * inv, RationalFunction::one());
    }

    #[test]
    fn integer_classes() {
        assert_eq!(
            integer_square_class(&BigInt::from(72)),
            (2.into(), 6.into())
        );
        assert_eq!(
            integer_square_class(&BigInt::from(-49)),
            ((-1).into(), 7.into())
        );
        let big = BigInt::from(1_000_003u64) * BigInt::from(1_000_003u64) * 3;
        assert_eq!(integer_square_class(&big), (3.into(), 1_000_003.into()));
    }

    #[test]
    fn function_square_classes() {
        // 8 t^3 (t+1)^2 / (t-1)^4 = 2t * (2t(t+1)/(t-1)^2)^2
        let x = RationalFunction::new(&p(&[0, 0, 0, 8]) * &p(&[1, 1]).pow(2), p(&[-1, 1]).pow(4));
        let (mu, r) = x.square_class();
        assert_eq!(mu, RationalFunction::from_poly(p(&[0, 2])));
        assert_eq!(mu * r.clone() * r, x);
        assert!(RationalFunction::from_poly(p(&[1, 2, 1])).is_square());
        assert!(!rat(3, 4).is_square());
        assert!(rat(9, 4).is_square());
    }
}
