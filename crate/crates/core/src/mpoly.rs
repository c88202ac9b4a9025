//! Sparse multivariate polynomials and a small Buchberger implementation.
//!
//! Used by the blowup chart engine (strict transforms, Jacobian ideals) and by
//! link validation (pullback identities). Ideals here are tiny, so clarity wins
//! over speed: terms live in a `BTreeMap` and the monomial order is grevlex.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Ring};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

/// Graded reverse lexicographic comparison.
pub fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            match x.cmp(y) {
                Ordering::Equal => continue,
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    })
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

impl<S: Ring> MPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::term(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::term(e, S::one())
    }

    pub fn term(exps: Monomial, c: S) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MPoly { nvars, terms }
    }

    /// Embeds a univariate polynomial in variable `i`.
    pub fn from_univariate(nvars: usize, i: usize, p: &crate::poly::Poly<S>) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, exps: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exps, s);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Lowest total degree of a term: the multiplicity at the origin.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Largest power of `x_i` dividing every term.
    pub fn var_valuation(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).min()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Exact division by `x_i^k`; `None` if some term is not divisible.
    pub fn div_var_power(&self, i: usize, k: u32) -> Option<Self> {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] < k {
                return None;
            }
            let mut e2 = e.clone();
            e2[i] -= k;
            out.add_term(e2, c.clone());
        }
        Some(out)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone() * S::from_i64(e[i] as i64));
        }
        out
    }

    /// Substitutes `x_i -> images[i]`; the result lives in the images' ring.
    pub fn substitute(&self, images: &[MPoly<S>]) -> MPoly<S> {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<MPoly<S>>> = images
            .iter()
            .map(|p| vec![MPoly::one(target), p.clone()])
            .collect();
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                t = t * x.pow_u32(k);
            }
            acc = acc + t;
        }
        acc
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> MPoly<T> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Leading monomial and coefficient under grevlex.
    pub fn lead(&self) -> Option<(&Monomial, &S)> {
        self.terms.iter().max_by(|a, b| grevlex(a.0, b.0))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }
}

impl<S: Ring + fmt::Display> MPoly<S> {
    /// Renders with the given variable names, terms in descending grevlex order.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| grevlex(b.0, a.0));
        let mut out = String::new();
        for (idx, (e, c)) in ts.into_iter().enumerate() {
            let mut mono = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => mono.push(names[i].to_string()),
                    _ => mono.push(format!("{}^{}", names[i], k)),
                }
            }
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            let body = match (mono.is_empty(), mag.as_str()) {
                (true, _) => mag,
                (false, "1") => mono.join("*"),
                (false, _) => format!("{}*{}", mag, mono.join("*")),
            };
            match (idx, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

impl<S: Field> MPoly<S> {
    pub fn monic(&self) -> Self {
        match self.lead() {
            Some((_, c)) => {
                let inv = c.inv();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Full reduction of `self` modulo `basis` (multivariate division remainder).
    pub fn reduce(&self, basis: &[MPoly<S>]) -> MPoly<S> {
        let leads: Vec<(Monomial, S)> = basis
            .iter()
            .filter_map(|g| g.lead().map(|(e, c)| (e.clone(), c.clone())))
            .collect();
        let mut p = self.clone();
        let mut rem = MPoly::zero(self.nvars);
        while let Some((e, c)) = p.lead().map(|(e, c)| (e.clone(), c.clone())) {
            let hit = basis
                .iter()
                .zip(&leads)
                .find(|(_, (le, _))| divides(le, &e));
            match hit {
                Some((g, (le, lc))) => {
                    let shift: Monomial = e.iter().zip(le).map(|(a, b)| a - b).collect();
                    let factor = MPoly::term(shift, c / lc.clone());
                    p = &p - &(&factor * g);
                }
                None => {
                    p.terms.remove(&e);
                    rem.add_term(e, c);
                }
            }
        }
        rem
    }
}

/// Reduced Gröbner basis (grevlex) of the ideal generated by `gens`.
pub fn groebner<S: Field>(gens: &[MPoly<S>]) -> Vec<MPoly<S>> {
    let mut basis: Vec<MPoly<S>> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic())
        .collect();
    if basis.iter().any(|g| g.is_constant()) {
        let nvars = basis[0].nvars();
        return vec![MPoly::one(nvars)];
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let (ei, _) = basis[i]
            .lead()
            .map(|(e, c)| (e.clone(), c.clone()))
            .unwrap();
        let (ej, _) = basis[j]
            .lead()
            .map(|(e, c)| (e.clone(), c.clone()))
            .unwrap();
        // Buchberger's first criterion: coprime leading monomials reduce to zero.
        if ei.iter().zip(&ej).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = lcm(&ei, &ej);
        let mi: Monomial = l.iter().zip(&ei).map(|(a, b)| a - b).collect();
        let mj: Monomial = l.iter().zip(&ej).map(|(a, b)| a - b).collect();
        let s =
            &(&MPoly::term(mi, S::one()) * &basis[i]) - &(&MPoly::term(mj, S::one()) * &basis[j]);
        let r = s.reduce(&basis);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_constant() {
            return vec![MPoly::one(r.nvars())];
        }
        let k = basis.len();
        basis.push(r);
        for i in 0..k {
            pairs.push((i, k));
        }
    }
    interreduce(basis)
}

fn interreduce<S: Field>(mut basis: Vec<MPoly<S>>) -> Vec<MPoly<S>> {
    // Drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<MPoly<S>> = Vec::new();
    basis.sort_by(|a, b| grevlex(a.lead().unwrap().0, b.lead().unwrap().0));
    for g in basis {
        let lg = g.lead().unwrap().0.clone();
        if keep.iter().any(|h| divides(h.lead().unwrap().0, &lg)) {
            continue;
        }
        keep.push(g);
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<MPoly<S>> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let lead = MPoly::term(keep[i].lead().unwrap().0.clone(), S::one());
        let tail = &keep[i] - &lead;
        out.push(&lead + &tail.reduce(&others));
    }
    out
}

/// Whether `1` lies in the ideal generated by `gens`.
pub fn is_unit_ideal<S: Field>(gens: &[MPoly<S>]) -> bool {
    groebner(gens)
        .iter()
        .any(|g| g.is_constant() && !g.is_zero())
}

impl<S: Ring> Add for &MPoly<S> {
    type Output = MPoly<S>;
    fn add(self, rhs: &MPoly<S>) -> MPoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<S: Ring> Sub for &MPoly<S> {
    type Output = MPoly<S>;
    fn sub(self, rhs: &MPoly<S>) -> MPoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<S: Ring> Mul for &MPoly<S> {
    type Output = MPoly<S>;
    #[allow(clippy::suspicious_arithmetic_impl)] // exponents add
    fn mul(self, rhs: &MPoly<S>) -> MPoly<S> {
        let mut out = MPoly::zero(self.nvars.max(rhs.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<S: Ring> Neg for &MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        self.scale(&-S::one())
    }
}

impl<S: Ring> Add for MPoly<S> {
    type Output = MPoly<S>;
    fn add(self, rhs: MPoly<S>) -> MPoly<S> {
        &self + &rhs
    }
}

impl<S: Ring> Sub for MPoly<S> {
    type Output = MPoly<S>;
    fn sub(self, rhs: MPoly<S>) -> MPoly<S> {
        &self - &rhs
    }
}

impl<S: Ring> Mul for MPoly<S> {
    type Output = MPoly<S>;
    fn mul(self, rhs: MPoly<S>) -> MPoly<S> {
        &self * &rhs
    }
}

impl<S: Ring> Neg for MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        -&self
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("z{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    type P = MPoly<Rational>;

    fn v(i: usize) -> P {
        P::var(3, i)
    }

    #[test]
    fn grevlex_orders_by_degree_then_reverse_lex() {
        assert_eq!(grevlex(&[1, 0, 0], &[0, 1, 0]), Ordering::Greater);
        assert_eq!(grevlex(&[0, 0, 2], &[1, 0, 0]), Ordering::Greater);
        // x*z < y^2 in grevlex
        assert_eq!(grevlex(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
    }

    #[test]
    fn substitution_composes() {
        let x = v(0);
        let y = v(1);
        let f = &(&x * &x) - &y;
        let g = f.substitute(&[&x + &y, y.clone(), v(2)]);
        let expected = &(&(&x * &x) + &(&(&x * &y).scale(&int(2)) + &(&y * &y))) - &y;
        assert_eq!(g, expected);
    }

    #[test]
    fn twisted_cubic_basis() {
        // (y - x^2, z - x^3) contains y^2 - x z ... check membership.
        let (x, y, z) = (v(0), v(1), v(2));
        let g = groebner(&[&y - &(&x * &x), &z - &(&(&x * &x) * &x)]);
        let probe = &(&y * &y) - &(&x * &z);
        assert!(probe.reduce(&g).is_zero());
        assert!(!x.reduce(&g).is_zero());
    }

    #[test]
    fn unit_ideal_detection() {
        let (x, y, _) = (v(0), v(1), v(2));
        let one = P::one(3);
        assert!(is_unit_ideal(&[&(&x * &y) - &one, x.clone()]));
        assert!(!is_unit_ideal(&[&(&x * &y) - &one, &x - &y]));
    }

    #[test]
    fn display_is_readable() {
        let (x, y, _) = (v(0), v(1), v(2));
        let f = &(&(&x * &x).scale(&int(3)) - &y) + &P::constant(3, int(-2));
        assert_eq!(f.to_string_with(&["x", "y", "z"]), "3*x^2 - y - 2");
    }
}
