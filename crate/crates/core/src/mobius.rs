//! 2×2 matrices acting on `P^1` and on binary forms.

use std::fmt;

use crate::scalar::{Field, Ring};

/// `[[a, b], [c, d]]`, acting as `(t0, t1) -> (a t0 + b t1, c t0 + d t1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Mobius<S> {
    pub m: [[S; 2]; 2],
}

impl<S: Ring> Mobius<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mobius {
            m: [[a, b], [c, d]],
        }
    }

    pub fn identity() -> Self {
        Self::new(S::one(), S::zero(), S::zero(), S::one())
    }

    /// `(t0, t1) -> (t1, t0)`
    pub fn swap() -> Self {
        Self::new(S::zero(), S::one(), S::one(), S::zero())
    }

    pub fn det(&self) -> S {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    /// Matrix product `self * rhs`: substituting by the product equals
    /// substituting by `self`, then by `rhs`.
    pub fn compose(&self, rhs: &Mobius<S>) -> Mobius<S> {
        let e = |i: usize, j: usize| {
            self.m[i][0].clone() * rhs.m[0][j].clone() + self.m[i][1].clone() * rhs.m[1][j].clone()
        };
        Mobius::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// Adjugate: the inverse up to the scalar `det`.
    pub fn adjugate(&self) -> Mobius<S> {
        Mobius::new(
            self.m[1][1].clone(),
            -self.m[0][1].clone(),
            -self.m[1][0].clone(),
            self.m[0][0].clone(),
        )
    }

    /// Image of the homogeneous point `(p : q)`.
    pub fn apply(&self, p: &S, q: &S) -> (S, S) {
        (
            self.m[0][0].clone() * p.clone() + self.m[0][1].clone() * q.clone(),
            self.m[1][0].clone() * p.clone() + self.m[1][1].clone() * q.clone(),
        )
    }

    pub fn entries(&self) -> [S; 4] {
        [
            self.m[0][0].clone(),
            self.m[0][1].clone(),
            self.m[1][0].clone(),
            self.m[1][1].clone(),
        ]
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Mobius<T> {
        Mobius::new(
            f(&self.m[0][0]),
            f(&self.m[0][1]),
            f(&self.m[1][0]),
            f(&self.m[1][1]),
        )
    }

    pub fn scale(&self, c: &S) -> Mobius<S> {
        self.map(|x| x.clone() * c.clone())
    }
}

impl<S: Field> Mobius<S> {
    /// Projective normalization: first nonzero entry (row-major) equal to 1.
    pub fn normalized(&self) -> Mobius<S> {
        match self.entries().into_iter().find(|x| !x.is_zero()) {
            Some(p) => self.scale(&p.inv()),
            None => self.clone(),
        }
    }

    pub fn inverse(&self) -> Option<Mobius<S>> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        Some(self.adjugate().scale(&d.inv()))
    }

    /// Projective equality (proportional matrices).
    pub fn projectively_equal(&self, other: &Mobius<S>) -> bool {
        self.normalized() == other.normalized()
    }
}

impl<S: fmt::Display> fmt::Display for Mobius<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl<S: fmt::Debug> fmt::Debug for Mobius<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mobius{:?}", self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mobius<Rational> {
        Mobius::new(int(a), int(b), int(c), int(d))
    }

    #[test]
    fn inverse_and_normalization() {
        let a = m(2, 1, 1, 1);
        let inv = a.inverse().unwrap();
        assert_eq!(a.compose(&inv), Mobius::identity());
        assert!(m(2, 4, 6, 8).projectively_equal(&m(1, 2, 3, 4)));
        assert!(m(1, 1, 1, 1).inverse().is_none());
    }

    #[test]
    fn apply_composes_like_matrices() {
        let a = m(1, 2, 0, 1);
        let b = m(0, 1, 1, 0);
        let (p, q) = b.apply(&int(3), &int(5));
        let (p, q) = a.apply(&p, &q);
        assert_eq!((p, q), a.compose(&b).apply(&int(3), &int(5)));
    }
}
