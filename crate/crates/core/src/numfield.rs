//! Exact arithmetic in a simple number field `Q[th]/(m(th))`.
//!
//! Elements carry their defining polynomial; a missing modulus marks a plain
//! rational that is compatible with every field. Combining elements of two
//! different fields is a logic error and panics.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::interval::ComplexInterval;
use crate::poly::Poly;
use crate::scalar::{Field, Rational, Ring};

#[derive(Clone)]
pub struct NfElem {
    rep: Poly<Rational>,
    modulus: Option<Arc<Poly<Rational>>>,
}

impl NfElem {
    /// The generator `th` of `Q[th]/(modulus)`. The modulus must be irreducible;
    /// it is normalized to be monic.
    pub fn generator(modulus: &Poly<Rational>) -> Self {
        let m = Arc::new(modulus.monic());
        NfElem::from_poly(Poly::x(), Some(m))
    }

    pub fn from_poly(rep: Poly<Rational>, modulus: Option<Arc<Poly<Rational>>>) -> Self {
        let rep = match &modulus {
            Some(m) if m.degree().unwrap_or(0) > 0 => rep.div_rem(m).1,
            _ => rep,
        };
        let modulus = if rep.degree().unwrap_or(0) == 0 {
            None
        } else {
            modulus
        };
        NfElem { rep, modulus }
    }

    pub fn rational(q: Rational) -> Self {
        NfElem {
            rep: Poly::constant(q),
            modulus: None,
        }
    }

    /// Polynomial in the generator representing this element.
    pub fn rep(&self) -> &Poly<Rational> {
        &self.rep
    }

    pub fn modulus(&self) -> Option<&Poly<Rational>> {
        self.modulus.as_deref()
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.rep.degree() {
            None => Some(Rational::zero()),
            Some(0) => Some(self.rep.coeff(0)),
            Some(_) => None,
        }
    }

    /// Numeric enclosure given an enclosure of the generator.
    pub fn embed(&self, generator: &ComplexInterval) -> ComplexInterval {
        self.rep
            .map(|c| ComplexInterval::real(c.clone()))
            .eval(generator)
    }

    fn join(a: &NfElem, b: &NfElem) -> Option<Arc<Poly<Rational>>> {
        match (&a.modulus, &b.modulus) {
            (Some(x), Some(y)) => {
                assert!(
                    Arc::ptr_eq(x, y) || x == y,
                    "mixing elements of different number fields"
                );
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep
    }
}

impl Eq for NfElem {}

impl Add for NfElem {
    type Output = NfElem;
    fn add(self, rhs: NfElem) -> NfElem {
        let m = NfElem::join(&self, &rhs);
        NfElem::from_poly(&self.rep + &rhs.rep, m)
    }
}

impl Sub for NfElem {
    type Output = NfElem;
    fn sub(self, rhs: NfElem) -> NfElem {
        let m = NfElem::join(&self, &rhs);
        NfElem::from_poly(&self.rep - &rhs.rep, m)
    }
}

impl Mul for NfElem {
    type Output = NfElem;
    fn mul(self, rhs: NfElem) -> NfElem {
        let m = NfElem::join(&self, &rhs);
        NfElem::from_poly(&self.rep * &rhs.rep, m)
    }
}

impl Neg for NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        NfElem {
            rep: -&self.rep,
            modulus: self.modulus,
        }
    }
}

impl Div for NfElem {
    type Output = NfElem;
    fn div(self, rhs: NfElem) -> NfElem {
        assert!(!rhs.is_zero(), "division by zero in number field");
        let inv = match (&rhs.modulus, rhs.as_rational()) {
            (_, Some(q)) => NfElem::rational(q.recip()),
            (Some(m), None) => {
                let (g, s, _) = rhs.rep.ext_gcd(m);
                assert_eq!(g.degree(), Some(0), "modulus is not irreducible");
                NfElem::from_poly(s, Some(m.clone()))
            }
            (None, None) => unreachable!("non-rational element without modulus"),
        };
        self * inv
    }
}

impl Zero for NfElem {
    fn zero() -> Self {
        NfElem {
            rep: Poly::zero(),
            modulus: None,
        }
    }
    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

impl One for NfElem {
    fn one() -> Self {
        NfElem::rational(Rational::one())
    }
}

impl Ring for NfElem {
    fn from_rational(q: &Rational) -> Self {
        NfElem::rational(q.clone())
    }
}

impl Field for NfElem {}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Rationals print as `p/q`; genuine field elements as a polynomial in `th`.
impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (i, c) in self.rep.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*th")?,
                _ => write!(f, "({c})*th^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn gaussian() -> NfElem {
        NfElem::generator(&Poly::new(vec![int(1), int(0), int(1)]))
    }

    #[test]
    fn gaussian_integers() {
        let i = gaussian();
        assert_eq!(i.clone() * i.clone(), NfElem::rational(int(-1)));
        let z = NfElem::rational(int(3)) + i.clone() * NfElem::rational(int(4));
        let w = z.clone() / z.clone();
        assert_eq!(w, NfElem::one());
        let inv = NfElem::one() / z.clone();
        // 1/(3+4i) = (3-4i)/25
        let expected = NfElem::rational(rat(3, 25)) - i * NfElem::rational(rat(4, 25));
        assert_eq!(inv, expected);
    }

    #[test]
    fn cubic_field_inverse() {
        let th = NfElem::generator(&Poly::new(vec![int(-2), int(0), int(0), int(1)]));
        let a = th.clone() * th.clone() + NfElem::one();
        let b = NfElem::one() / a.clone();
        assert_eq!(a * b, NfElem::one());
        assert_eq!(th.pow_u32(3), NfElem::rational(int(2)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(NfElem::rational(rat(-3, 4)).to_string(), "-3/4");
        let i = gaussian();
        assert_eq!((NfElem::rational(int(2)) - i).to_string(), "2+(-1)*th");
    }
}
