//! Quadric fibrations `x1^2 - x0 x2 + x3^2 + ... + x_{n-1}^2 + g xn^2 = 0` in
//! `P(O^n + O(-a))` over `P^1`: validation, singular locus, Picard and Mori
//! data, automorphisms and orbits.

use num_traits::{One, Zero};

use crate::binform::{BinaryForm, PointP1, RootDivisor};
use crate::error::{Error, Result};
use crate::mobius::Mobius;
use crate::numfield::NfElem;
use crate::poly::Poly;
use crate::scalar::Rational;

/// A validated fibration with fiber dimension `n` and form `g` of degree `2a`.
#[derive(Clone, Debug, PartialEq)]
pub struct UmemuraFibration {
    n: usize,
    g: BinaryForm,
    a: usize,
    roots: RootDivisor,
    singular: Vec<SingularPoint>,
}

/// The vertex `(0:...:0:1; t)` of the fiber over a multiple root `t` of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    pub point: PointP1,
    /// Multiplicity `k >= 2` of the root.
    pub multiplicity: u32,
    /// Unit `gamma` in the local expansion `g = t^k gamma(t)`; exact for
    /// rational roots, the constant 1 (an analytically equivalent choice)
    /// otherwise.
    pub gamma: Poly<Rational>,
    pub gamma_exact: bool,
}

/// Build and validate a fibration; `cap` bounds root isolation precision.
pub fn build_fibration(n: usize, g: &BinaryForm, cap: u32) -> Result<UmemuraFibration> {
    if g.is_zero() {
        return Err(Error::ZeroForm);
    }
    if g.degree() % 2 == 1 {
        return Err(Error::OddDegree { degree: g.degree() });
    }
    if n < 3 {
        return Err(Error::DimensionTooSmall { n });
    }
    let roots = g.root_divisor(cap)?;
    let singular = roots
        .entries
        .iter()
        .filter(|(_, k)| *k >= 2)
        .map(|(p, k)| local_unit(g, p, *k))
        .collect();
    Ok(UmemuraFibration {
        n,
        g: g.clone(),
        a: g.degree() / 2,
        roots,
        singular,
    })
}

fn local_unit(g: &BinaryForm, p: &PointP1, k: u32) -> SingularPoint {
    let (gamma, exact) = match p.as_rational() {
        Some((p0, q0)) => {
            // beta(0:1) = P, so g o beta has its root at t0 = 0.
            let beta = if q0.is_zero() {
                Mobius::swap()
            } else {
                Mobius::new(Rational::one(), p0, Rational::zero(), q0)
            };
            let local = g.substitute_unchecked(&beta).dehomogenize().0;
            let shifted = Poly::new(local.coeffs()[k as usize..].to_vec());
            (shifted, true)
        }
        None => (Poly::one(), false),
    };
    SingularPoint {
        point: p.clone(),
        multiplicity: k,
        gamma,
        gamma_exact: exact,
    }
}

impl UmemuraFibration {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> &BinaryForm {
        &self.g
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn roots(&self) -> &RootDivisor {
        &self.roots
    }

    pub fn singular_points(&self) -> &[SingularPoint] {
        &self.singular
    }

    /// Number of distinct roots of `g` in `P^1`, infinity included.
    pub fn distinct_roots(&self) -> usize {
        self.roots.distinct_count()
    }
}

/// Pic with basis `(H, F)`, curves `(e, sigma)`; `H = {xn = 0}`, `F` a fiber,
/// `e` a line in a fiber, `sigma` the section `(1:0:...:0; t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardMoriData {
    /// `[[H.e, H.sigma], [F.e, F.sigma]]`
    pub intersection_matrix: [[i64; 2]; 2],
    /// `K = c_H H + c_F F`
    pub canonical_class: [i64; 2],
    /// `(K.e, K.sigma)`
    pub k_pairings: [i64; 2],
    /// `K.e` recomputed on a smooth fiber by adjunction in `P^n`.
    pub k_dot_e_adjunction: i64,
}

impl PicardMoriData {
    /// `K.e` and `K.sigma` recomputed from the stored class and matrix.
    pub fn recomputed_pairings(&self) -> [i64; 2] {
        let [ch, cf] = self.canonical_class;
        let m = self.intersection_matrix;
        [ch * m[0][0] + cf * m[1][0], ch * m[0][1] + cf * m[1][1]]
    }

    pub fn is_consistent(&self) -> bool {
        self.recomputed_pairings() == self.k_pairings
            && self.k_pairings[0] == self.k_dot_e_adjunction
    }
}

/// Canonical class by the toric ambient: with `xi = H + aF` the class of
/// `x0, ..., x_{n-1}`, `K_P = -(n xi + H + 2F)`, `Q ~ 2 xi`, and adjunction
/// gives `K = (K_P + Q)|_Q`.
pub fn picard_mori(x: &UmemuraFibration) -> PicardMoriData {
    let n = x.n as i64;
    let a = x.a as i64;
    // Classes as (H, F) coefficient pairs.
    let xi = [1, a];
    let k_ambient = [-(n * xi[0] + 1), -(n * xi[1] + 2)];
    let quadric = [2 * xi[0], 2 * xi[1]];
    let canonical_class = [k_ambient[0] + quadric[0], k_ambient[1] + quadric[1]];
    let intersection_matrix = [[1, -a], [0, 1]];
    let k_e = canonical_class[0] * intersection_matrix[0][0]
        + canonical_class[1] * intersection_matrix[1][0];
    let k_sigma = canonical_class[0] * intersection_matrix[0][1]
        + canonical_class[1] * intersection_matrix[1][1];
    // Smooth fiber: quadric of degree 2 in P^n, K_F.line = -(n+1) + 2.
    let k_dot_e_adjunction = -(n + 1) + 2;
    PicardMoriData {
        intersection_matrix,
        canonical_class,
        k_pairings: [k_e, k_sigma],
        k_dot_e_adjunction,
    }
}

/// Image of `Aut°` in `PGL_2` acting on the base.
#[derive(Clone, Debug, PartialEq)]
pub enum HorizontalPart {
    /// More than two roots: the base is fixed.
    Trivial,
    /// At most two roots: after `g o alpha = c t0^a0 t1^a1` the group contains
    /// `lambda . (x; t0, t1) = (x0 : ... : lambda^xn_weight xn; t0, lambda^2 t1)`.
    OneParameter {
        a0: u32,
        a1: u32,
        xn_weight: i64,
        coordinate_change: Mobius<NfElem>,
    },
    /// `g` constant: a product with `P^1`, whole `PGL_2`.
    FullPgl2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutProfile {
    /// `SO_n`
    pub vertical_group: String,
    pub vertical_dimension: usize,
    pub horizontal: HorizontalPart,
    /// `dim Aut(P(E_a))_{P^1} = n^2 + n(a+1)`.
    pub ambient_vertical_dimension: usize,
}

pub fn automorphism_profile(x: &UmemuraFibration) -> AutProfile {
    let n = x.n;
    let horizontal = if x.g.is_constant() {
        HorizontalPart::FullPgl2
    } else if x.distinct_roots() > 2 {
        HorizontalPart::Trivial
    } else {
        let (alpha, a0, a1) = normalizing_map(&x.roots);
        HorizontalPart::OneParameter {
            a0,
            a1,
            xn_weight: -(a1 as i64),
            coordinate_change: alpha,
        }
    };
    AutProfile {
        vertical_group: format!("SO_{n}"),
        vertical_dimension: n * (n - 1) / 2,
        horizontal,
        ambient_vertical_dimension: n * n + n * (x.a + 1),
    }
}

/// For a form with one or two roots, a map `alpha` with
/// `g o alpha = c * t0^a0 * t1^a1`. With two roots the one of smaller
/// multiplicity (first in canonical order on ties) goes to `(0:1)`; a single
/// root goes to `(0:1)`.
pub fn normalizing_map(roots: &RootDivisor) -> (Mobius<NfElem>, u32, u32) {
    let q = |x: Rational| NfElem::rational(x);
    let column = |p: &PointP1, partner: Option<&PointP1>| -> (NfElem, NfElem) {
        match p.as_rational() {
            Some((a, b)) => (q(a), q(b)),
            None => {
                // Conjugate pair: th and its conjugate -b/a - th in the chart t1 = 1.
                let (_, th) = p.algebraic_linear_form().expect("algebraic point");
                let m = g_minpoly(p);
                if partner.is_some() {
                    let sum = -m.coeff(1) / m.coeff(2);
                    (NfElem::rational(sum) - th, NfElem::one())
                } else {
                    (th, NfElem::one())
                }
            }
        }
    };
    let e = &roots.entries;
    let (alpha, a0, a1) = if e.len() == 1 {
        let (p, k) = &e[0];
        let (pp, pq) = column(p, None);
        let first = if pq.is_zero() {
            (NfElem::zero(), NfElem::one())
        } else {
            (NfElem::one(), NfElem::zero())
        };
        (Mobius::new(first.0, pp, first.1, pq), *k, 0)
    } else {
        let (lo, hi) = if e[1].1 < e[0].1 {
            (&e[1], &e[0])
        } else {
            (&e[0], &e[1])
        };
        let (pp, pq) = column(&lo.0, None);
        let (qp, qq) = if matches!(hi.0, PointP1::Algebraic(_)) {
            column(&lo.0, Some(&hi.0))
        } else {
            column(&hi.0, None)
        };
        (Mobius::new(qp, pp, qq, pq), lo.1, hi.1)
    };
    (alpha, a0, a1)
}

fn g_minpoly(p: &PointP1) -> Poly<Rational> {
    match p {
        PointP1::Algebraic(a) => a.minimal_polynomial.dehomogenize().0,
        PointP1::Rational(_) => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrbitLabel {
    VertexPoint,
    GammaT,
    Complement,
}

impl OrbitLabel {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitLabel::VertexPoint => "VertexPoint",
            OrbitLabel::GammaT => "Gamma_t",
            OrbitLabel::Complement => "Complement",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberClass {
    NonRoot,
    Root(PointP1, u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStratum {
    pub fiber: FiberClass,
    pub label: OrbitLabel,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCensus {
    pub strata: Vec<OrbitStratum>,
    /// The strata are the `Aut°` orbits (not just those of the vertical part).
    pub full_description: bool,
}

/// Orbits of the vertical automorphism group, one block per fiber class:
/// the generic class first, then roots in canonical order.
pub fn orbit_census(x: &UmemuraFibration) -> OrbitCensus {
    let n = x.n;
    let generic = |fiber: FiberClass| {
        vec![
            OrbitStratum {
                fiber: fiber.clone(),
                label: OrbitLabel::GammaT,
                dimension: n - 2,
            },
            OrbitStratum {
                fiber,
                label: OrbitLabel::Complement,
                dimension: n - 1,
            },
        ]
    };
    let mut strata = generic(FiberClass::NonRoot);
    for (p, k) in &x.roots.entries {
        let fiber = FiberClass::Root(p.clone(), *k);
        strata.push(OrbitStratum {
            fiber: fiber.clone(),
            label: OrbitLabel::VertexPoint,
            dimension: 0,
        });
        strata.extend(generic(fiber));
    }
    OrbitCensus {
        strata,
        full_description: x.distinct_roots() > 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binform::Form;
    use crate::roots::DEFAULT_PRECISION_CAP as CAP;
    use crate::scalar::int;

    fn f(c: &[i64]) -> BinaryForm {
        Form::from_integers(c)
    }

    #[test]
    fn validation_errors() {
        assert_eq!(build_fibration(3, &f(&[0]), CAP), Err(Error::ZeroForm));
        assert_eq!(
            build_fibration(3, &f(&[1, 0]), CAP),
            Err(Error::OddDegree { degree: 1 })
        );
        assert_eq!(
            build_fibration(2, &f(&[1]), CAP),
            Err(Error::DimensionTooSmall { n: 2 })
        );
    }

    #[test]
    fn singular_locus_of_t0_t1_cubed() {
        let x = build_fibration(3, &f(&[0, 0, 0, 1, 0]), CAP).unwrap();
        assert_eq!(x.a(), 2);
        let s = x.singular_points();
        assert_eq!(s.len(), 1);
        assert!(s[0].point.is_infinity());
        assert_eq!(s[0].multiplicity, 3);
        assert_eq!(s[0].gamma, Poly::one());
    }

    #[test]
    fn local_unit_is_exact() {
        // g = (t0 - t1)^2 (t0 + t1)^2: at (1:1), local t^2 (t + 2)^2
        let l = f(&[1, -1]).mul(&f(&[1, 1]));
        let x = build_fibration(3, &l.pow(2), CAP).unwrap();
        let sp = x
            .singular_points()
            .iter()
            .find(|s| s.point == PointP1::from_ints(1, 1))
            .unwrap();
        assert_eq!(sp.gamma, Poly::new(vec![int(4), int(4), int(1)]));
    }

    #[test]
    fn canonical_class() {
        let x = build_fibration(4, &f(&[0, 1, 0]), CAP).unwrap();
        let pm = picard_mori(&x);
        assert_eq!(pm.canonical_class, [-3, -4]);
        assert_eq!(pm.k_pairings, [-3, -1]);
        assert!(pm.is_consistent());
    }

    #[test]
    fn two_root_weights() {
        let x = build_fibration(3, &f(&[0, 1, 0]), CAP).unwrap();
        match automorphism_profile(&x).horizontal {
            HorizontalPart::OneParameter {
                a0, a1, xn_weight, ..
            } => {
                assert_eq!((a0, a1, xn_weight), (1, 1, -1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normalizes_conjugate_pair() {
        // (t0^2 + t1^2)^3 (t0^2 + t1^2) -> t0^4 t1^4 after an algebraic map
        let g = f(&[1, 0, 1]).pow(4);
        let x = build_fibration(3, &g, CAP).unwrap();
        let (alpha, a0, a1) = normalizing_map(x.roots());
        assert_eq!((a0, a1), (4, 4));
        let image = g
            .map(|c| NfElem::rational(c.clone()))
            .substitute_mobius(&alpha)
            .unwrap();
        for (i, c) in image.coeffs().iter().enumerate() {
            assert_eq!(i == 4, !c.is_zero(), "coefficient {i} = {c}");
        }
    }
}
