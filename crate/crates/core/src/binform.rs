//! Homogeneous binary forms in `t0, t1`.
//!
//! Coefficient `i` of a degree-`d` form multiplies `t0^(d-i) * t1^i`. The affine
//! chart is `t1 = 1` with coordinate `x = t0/t1`; the point at infinity is
//! `(1:0)` and its multiplicity is the number of leading zero coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::factor_rational;
use crate::interval::ComplexInterval;
use crate::mobius::Mobius;
use crate::mpoly::MPoly;
use crate::numfield::NfElem;
use crate::poly::Poly;
use crate::roots::isolate_all;
use crate::scalar::{parse_rational, Rational, Ring};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form<S> {
    coeffs: Vec<S>,
}

impl<S: Ring> Form<S> {
    /// Coefficients by descending `t0` power. An all-zero input becomes the
    /// zero form of degree 0.
    pub fn new(coeffs: Vec<S>) -> Self {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Form {
                coeffs: vec![S::zero()],
            };
        }
        Form { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Form::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `a*t0 + b*t1`
    pub fn linear(a: S, b: S) -> Self {
        Form::new(vec![a, b])
    }

    pub fn t0() -> Self {
        Self::linear(S::one(), S::zero())
    }

    pub fn t1() -> Self {
        Self::linear(S::zero(), S::one())
    }

    /// `c * t0^(d-i) * t1^i`
    pub fn monomial(c: S, d: usize, i: usize) -> Self {
        let mut coeffs = vec![S::zero(); d + 1];
        coeffs[i] = c;
        Form { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn scale(&self, c: &S) -> Self {
        Form::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, rhs: &Form<S>) -> Form<S> {
        if self.is_zero() || rhs.is_zero() {
            return Form::new(vec![S::zero()]);
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Form { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Form<S> {
        (0..e).fold(Form::one(), |acc, _| acc.mul(self))
    }

    /// Sum of two forms of equal degree (the zero form adapts).
    pub fn add(&self, rhs: &Form<S>) -> Form<S> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.degree(),
            rhs.degree(),
            "adding forms of different degree"
        );
        Form::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Form<S>) -> Form<S> {
        self.add(&rhs.scale(&-S::one()))
    }

    pub fn eval(&self, t0: &S, t1: &S) -> S {
        let d = self.degree() as u32;
        self.coeffs
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, c)| {
                acc + c.clone() * t0.pow_u32(d - i as u32) * t1.pow_u32(i as u32)
            })
    }

    /// `g(a t0 + b t1, c t0 + d t1)`.
    pub fn substitute_mobius(&self, alpha: &Mobius<S>) -> Result<Form<S>> {
        if alpha.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.substitute_unchecked(alpha))
    }

    pub(crate) fn substitute_unchecked(&self, alpha: &Mobius<S>) -> Form<S> {
        let d = self.degree();
        let l0 = Form::linear(alpha.m[0][0].clone(), alpha.m[0][1].clone());
        let l1 = Form::linear(alpha.m[1][0].clone(), alpha.m[1][1].clone());
        let p0: Vec<Form<S>> = (0..=d).map(|e| l0.pow(e as u32)).collect();
        let p1: Vec<Form<S>> = (0..=d).map(|e| l1.pow(e as u32)).collect();
        let mut acc = vec![S::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = p0[d - i].mul(&p1[i]);
            for (k, x) in t.coeffs.iter().enumerate() {
                acc[k] = acc[k].clone() + c.clone() * x.clone();
            }
        }
        Form::new(acc)
    }

    pub fn partial_t0(&self) -> Form<S> {
        let d = self.degree();
        if d == 0 {
            return Form::new(vec![S::zero()]);
        }
        Form::new(
            (0..d)
                .map(|i| self.coeffs[i].clone() * S::from_i64((d - i) as i64))
                .collect(),
        )
    }

    pub fn partial_t1(&self) -> Form<S> {
        let d = self.degree();
        if d == 0 {
            return Form::new(vec![S::zero()]);
        }
        Form::new(
            (1..=d)
                .map(|i| self.coeffs[i].clone() * S::from_i64(i as i64))
                .collect(),
        )
    }

    /// `(g(x, 1), m)` where `m` is the multiplicity of the root `(1:0)`.
    pub fn dehomogenize(&self) -> (Poly<S>, usize) {
        let m = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let m = m.min(self.degree());
        let p = Poly::new(self.coeffs.iter().rev().cloned().collect());
        (p, if self.is_zero() { 0 } else { m })
    }

    /// `t1^deg(p) * p(t0/t1)`.
    pub fn homogenize(p: &Poly<S>) -> Form<S> {
        match p.degree() {
            None => Form::new(vec![S::zero()]),
            Some(d) => Form::new((0..=d).map(|i| p.coeff(d - i)).collect()),
        }
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Form<T> {
        Form::new(self.coeffs.iter().map(f).collect())
    }

    /// The form as a polynomial in two variables `(t0, t1)`.
    pub fn to_mpoly(&self) -> MPoly<S> {
        let d = self.degree() as u32;
        let mut out = MPoly::zero(2);
        for (i, c) in self.coeffs.iter().enumerate() {
            out = &out + &MPoly::term(vec![d - i as u32, i as u32], c.clone());
        }
        out
    }
}

/// Result of [`Form::squarefree_decompose`]: `c * g = f^2 * h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub f: BinaryForm,
    pub h: BinaryForm,
    pub c: Rational,
}

pub type BinaryForm = Form<Rational>;

impl Form<Rational> {
    pub fn from_integers(c: &[i64]) -> Self {
        Form::new(
            c.iter()
                .map(|&x| Rational::from_integer(x.into()))
                .collect(),
        )
    }

    /// `(s, canonical)` with `self = s * canonical`, canonical having integer
    /// content 1 and positive first nonzero coefficient.
    pub fn canonicalize(&self) -> (Rational, BinaryForm) {
        if self.is_zero() {
            return (Rational::one(), self.clone());
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_negative())
        {
            g = -g;
        }
        let canon = Form::new(
            ints.iter()
                .map(|c| Rational::from_integer(c / &g))
                .collect(),
        );
        (Rational::new(g, den), canon)
    }

    pub fn canonical(&self) -> BinaryForm {
        self.canonicalize().1
    }

    /// Greatest common divisor as a canonical form.
    pub fn gcd(&self, other: &BinaryForm) -> BinaryForm {
        if self.is_zero() {
            return other.canonical();
        }
        if other.is_zero() {
            return self.canonical();
        }
        let (a, ma) = self.dehomogenize();
        let (b, mb) = other.dehomogenize();
        let g = Form::homogenize(&a.gcd(&b));
        g.mul(&Form::t1().pow(ma.min(mb) as u32)).canonical()
    }

    /// No repeated roots in `P^1`, including at infinity.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let (a, m) = self.dehomogenize();
        m <= 1 && a.is_squarefree()
    }

    /// Squarefreeness via `gcd(h, dh/dt0, dh/dt1)`, independent of the
    /// dehomogenized Yun path.
    pub fn jacobian_gcd_is_trivial(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.degree() <= 1 {
            return true;
        }
        self.gcd(&self.partial_t0())
            .gcd(&self.partial_t1())
            .degree()
            == 0
    }

    /// Number of distinct roots in `P^1`.
    pub fn distinct_root_count(&self) -> usize {
        let (a, m) = self.dehomogenize();
        let affine = match a.degree() {
            None | Some(0) => 0,
            Some(_) => a
                .exact_div(&a.gcd(&a.derivative()))
                .unwrap()
                .degree()
                .unwrap(),
        };
        affine + usize::from(m > 0)
    }

    /// Writes `c * g = f^2 * h` with `h` squarefree; `f`, `h` canonical.
    pub fn squarefree_decompose(&self) -> Result<SquarefreeDecomposition> {
        if self.is_zero() {
            return Err(Error::ZeroForm);
        }
        let (a, m) = self.dehomogenize();
        let (_, parts) = a.squarefree_factors();
        let mut f = Form::t1().pow((m / 2) as u32);
        let mut h = Form::t1().pow((m % 2) as u32);
        for (i, s) in parts.iter().enumerate() {
            let e = (i + 1) as u32;
            let sf = Form::homogenize(s);
            f = f.mul(&sf.pow(e / 2));
            if e % 2 == 1 {
                h = h.mul(&sf);
            }
        }
        let f = f.canonical();
        let h = h.canonical();
        let prod = f.pow(2).mul(&h);
        let idx = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let c = prod.coeff(idx) / self.coeff(idx);
        if prod != self.scale(&c) {
            return Err(Error::Internal("squarefree identity failed".into()));
        }
        Ok(SquarefreeDecomposition { f, h, c })
    }

    /// Irreducible factorization with canonical factors (the factor `t1`
    /// included), sorted by degree then coefficients.
    pub fn factor(&self) -> Result<(Rational, Vec<(BinaryForm, u32)>)> {
        if self.is_zero() {
            return Err(Error::ZeroForm);
        }
        let (a, m) = self.dehomogenize();
        let (_, parts) = factor_rational(&a);
        let mut out: Vec<(BinaryForm, u32)> = parts
            .iter()
            .map(|(p, e)| (Form::homogenize(p).canonical(), *e))
            .collect();
        if m > 0 {
            out.push((Form::t1(), m as u32));
        }
        out.sort_by(|x, y| {
            x.0.degree()
                .cmp(&y.0.degree())
                .then_with(|| x.0.coeffs.cmp(&y.0.coeffs))
        });
        let mut prod = Form::one();
        for (p, e) in &out {
            prod = prod.mul(&p.pow(*e));
        }
        let idx = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let scale = self.coeff(idx) / prod.coeff(idx);
        Ok((scale, out))
    }

    /// All distinct roots in `P^1` with multiplicities.
    pub fn root_divisor(&self, cap: u32) -> Result<RootDivisor> {
        if self.is_zero() {
            return Err(Error::ZeroForm);
        }
        let (_, factors) = self.factor()?;
        let mut entries = Vec::new();
        let mut rational_x = Vec::new();
        let mut nonlinear = Vec::new();
        for (p, e) in &factors {
            if p.degree() == 1 {
                // a*t0 + b*t1 = 0  <=>  (t0:t1) = (-b : a)
                let pt = PointP1::rational_from(&-p.coeff(1), &p.coeff(0));
                if let PointP1::Rational(r) = &pt {
                    if !r.q.is_zero() {
                        rational_x.push(Rational::new(r.p.clone(), r.q.clone()));
                    }
                }
                entries.push((pt, *e));
            } else {
                nonlinear.push((p.clone(), *e));
            }
        }
        let affine: Vec<Poly<Rational>> =
            nonlinear.iter().map(|(p, _)| p.dehomogenize().0).collect();
        let boxes = isolate_all(&affine, &rational_x, cap)?;
        for ((p, e), bs) in nonlinear.iter().zip(boxes) {
            for b in bs {
                entries.push((
                    PointP1::Algebraic(AlgebraicPoint {
                        minimal_polynomial: p.clone(),
                        isolating_box: b,
                        at_infinity: false,
                    }),
                    *e,
                ));
            }
        }
        entries.sort_by_key(|a| a.0.key());
        Ok(RootDivisor { entries })
    }

    /// Text coefficients `p/q`, descending `t0` power.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree(),
            coefficients: self.coefficient_strings(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<BinaryForm> {
        if j.coefficients.len() != j.degree + 1 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!(
                    "degree {} needs {} coefficients, got {}",
                    j.degree,
                    j.degree + 1,
                    j.coefficients.len()
                ),
            });
        }
        let coeffs = j
            .coefficients
            .iter()
            .map(|s| {
                parse_rational(s).ok_or_else(|| Error::Parse {
                    line: 1,
                    column: 1,
                    message: format!("bad rational '{s}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Form { coeffs })
    }
}

/// Wire format of a form: integer degree plus `p/q` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub degree: usize,
    pub coefficients: Vec<String>,
}

impl<S: Ring + fmt::Display> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_mpoly().to_string_with(&["t0", "t1"]))
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({self})")
    }
}

/// A rational point `(p:q)` with coprime integers, `q > 0` or `(1:0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub p: BigInt,
    pub q: BigInt,
}

/// An irrational point: root of an irreducible form inside a certified box of
/// the affine chart `t1 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicPoint {
    pub minimal_polynomial: BinaryForm,
    pub isolating_box: ComplexInterval,
    pub at_infinity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointP1 {
    Rational(RationalPoint),
    Algebraic(AlgebraicPoint),
}

impl PointP1 {
    /// The point `(p:q)` for rationals `p, q` not both zero.
    pub fn rational_from(p: &Rational, q: &Rational) -> PointP1 {
        assert!(!(p.is_zero() && q.is_zero()), "(0:0) is not a point");
        let den = p.denom().lcm(q.denom());
        let mut a = (p * Rational::from_integer(den.clone())).to_integer();
        let mut b = (q * Rational::from_integer(den)).to_integer();
        let g = a.gcd(&b);
        a /= &g;
        b /= &g;
        if b.is_negative() || (b.is_zero() && a.is_negative()) {
            a = -a;
            b = -b;
        }
        PointP1::Rational(RationalPoint { p: a, q: b })
    }

    pub fn from_ints(p: i64, q: i64) -> PointP1 {
        PointP1::rational_from(
            &Rational::from_integer(p.into()),
            &Rational::from_integer(q.into()),
        )
    }

    pub fn infinity() -> PointP1 {
        PointP1::from_ints(1, 0)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointP1::Rational(r) if r.q.is_zero())
    }

    pub fn as_rational(&self) -> Option<(Rational, Rational)> {
        match self {
            PointP1::Rational(r) => Some((
                Rational::from_integer(r.p.clone()),
                Rational::from_integer(r.q.clone()),
            )),
            PointP1::Algebraic(_) => None,
        }
    }

    /// Canonical serialization, also the sort key.
    pub fn key(&self) -> String {
        match self {
            PointP1::Rational(r) => format!("({}:{})", r.p, r.q),
            PointP1::Algebraic(a) => format!(
                "root of [{}] in {}",
                a.minimal_polynomial.coefficient_strings().join(","),
                a.isolating_box
            ),
        }
    }

    /// Canonical linear form vanishing at a rational point: `q t0 - p t1`.
    pub fn linear_form(&self) -> Option<BinaryForm> {
        let (p, q) = self.as_rational()?;
        Some(Form::linear(q, -p).canonical())
    }

    /// Linear form `t0 - th*t1` over `Q(th)` for an algebraic point, where `th`
    /// is a root of the affine minimal polynomial (the box selects which).
    pub fn algebraic_linear_form(&self) -> Option<(Form<NfElem>, NfElem)> {
        match self {
            PointP1::Algebraic(a) => {
                let th = NfElem::generator(&a.minimal_polynomial.dehomogenize().0);
                Some((Form::linear(NfElem::one(), -th.clone()), th))
            }
            PointP1::Rational(_) => None,
        }
    }
}

/// Distinct roots with multiplicities, sorted by [`PointP1::key`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDivisor {
    pub entries: Vec<(PointP1, u32)>,
}

impl RootDivisor {
    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    pub fn points(&self) -> impl Iterator<Item = &PointP1> {
        self.entries.iter().map(|(p, _)| p)
    }

    pub fn all_rational(&self) -> bool {
        self.entries
            .iter()
            .all(|(p, _)| matches!(p, PointP1::Rational(_)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::DEFAULT_PRECISION_CAP;
    use crate::scalar::int;

    fn f(c: &[i64]) -> BinaryForm {
        Form::from_integers(c)
    }

    #[test]
    fn mobius_substitution_composes() {
        let g = f(&[0, 1, -3, 2, 0]);
        let a = Mobius::new(int(1), int(1), int(0), int(1));
        let b = Mobius::new(int(2), int(-1), int(1), int(3));
        let lhs = g
            .substitute_mobius(&a)
            .unwrap()
            .substitute_mobius(&b)
            .unwrap();
        let rhs = g.substitute_mobius(&a.compose(&b)).unwrap();
        assert_eq!(lhs, rhs);
        let singular = Mobius::new(int(1), int(2), int(2), int(4));
        assert_eq!(g.substitute_mobius(&singular), Err(Error::SingularMatrix));
    }

    #[test]
    fn decompose_mixed_square() {
        // t0^2 (t0^2 + t1^2)
        let g = f(&[1, 0, 1, 0, 0]);
        let d = g.squarefree_decompose().unwrap();
        assert_eq!(d.f, f(&[1, 0]));
        assert_eq!(d.h, f(&[1, 0, 1]));
        assert!(d.h.jacobian_gcd_is_trivial());
    }

    #[test]
    fn infinity_is_tracked_through_t1_powers() {
        // t0^4 t1^2 -> f = t0^2 t1, h = 1
        let g = f(&[0, 0, 1, 0, 0, 0, 0]);
        let d = g.squarefree_decompose().unwrap();
        assert_eq!(d.h, Form::one());
        assert_eq!(d.f, f(&[0, 1, 0, 0]));
        let rd = g.root_divisor(DEFAULT_PRECISION_CAP).unwrap();
        let keys: Vec<(String, u32)> = rd.entries.iter().map(|(p, m)| (p.key(), *m)).collect();
        assert_eq!(keys, vec![("(0:1)".into(), 4), ("(1:0)".into(), 2)]);
    }

    #[test]
    fn algebraic_roots_of_a_square() {
        let g = f(&[1, 0, 1]).pow(2);
        let rd = g.root_divisor(DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(rd.entries.len(), 2);
        assert!(rd
            .entries
            .iter()
            .all(|(p, m)| *m == 2 && matches!(p, PointP1::Algebraic(_))));
    }

    #[test]
    fn json_round_trip() {
        let g = Form::new(vec![Rational::new(1.into(), 3.into()), int(-2), int(0)]);
        let j = g.to_json();
        assert_eq!(j.coefficients, vec!["1/3", "-2", "0"]);
        assert_eq!(Form::from_json(&j).unwrap(), g);
    }

    #[test]
    fn display_uses_t_names() {
        assert_eq!(
            f(&[0, 1, -3, 2, 0]).to_string(),
            "t0^3*t1 - 3*t0^2*t1^2 + 2*t0*t1^3"
        );
    }
}
