//! Links between quadric fibrations, reduction to a squarefree model, and the
//! maximality and conjugacy decisions built on them.
//!
//! Variables of a fibration `Q_g` are `x0, ..., xn, t0, t1`; the defining
//! polynomial is `x1^2 - x0 x2 + x3^2 + ... + x_{n-1}^2 + g(t0, t1) xn^2`.

use std::fmt::Display;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::binform::{BinaryForm, Form, FormJson, PointP1};
use crate::error::{Error, Result};
use crate::fibration::{automorphism_profile, build_fibration, HorizontalPart, UmemuraFibration};
use crate::interval::ComplexInterval;
use crate::mpoly::MPoly;
use crate::numfield::NfElem;
use crate::pgl2equiv::{cross_ratio_fingerprint, find_mobius_witness, EquivalenceVerdict};
use crate::roots::isolate_to_width;
use crate::scalar::{Field, Rational, Ring};

/// Width (bits) of root boxes for links over roots of degree >= 3.
const NUMERIC_BITS: u32 = 64;
/// Outward rounding used to keep interval endpoints short.
const ROUND_BITS: u32 = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LinkKind {
    DivideBySquare,
    MultiplyBySquare,
    TerminalToQuadric,
    ProductNoLinks,
}

/// Over which scalars a link is written down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LinkField {
    Rational,
    Quadratic,
    Numeric,
}

/// The linear form `l = a t0 + b t1` of a link.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearFormLabel {
    pub field: LinkField,
    /// Minimal polynomial of the generator `th` (ascending coefficients).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<String>>,
    pub coefficients: [String; 2],
    pub point: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FibrationSide {
    pub n: usize,
    pub field: LinkField,
    /// Coefficients by descending `t0` power.
    pub form: Vec<String>,
}

/// The smooth quadric `y1^2 - y0 y2 + y3^2 + ... + y_{n-1}^2 + yn y_{n+1}` in
/// `P^{n+1}` with the codimension-2 subspace `yn = y_{n+1} = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadricTarget {
    pub n: usize,
    pub equation: String,
    pub marked_subspace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum LinkTarget {
    Fibration(FibrationSide),
    Quadric(QuadricTarget),
}

#[derive(Clone, Debug)]
struct LinkPolys<S: Ring + Display> {
    source: MPoly<S>,
    target: MPoly<S>,
    images: Vec<MPoly<S>>,
    /// Expected `pullback / source`.
    quotient: MPoly<S>,
}

#[derive(Clone, Debug)]
enum LinkData {
    Rational(LinkPolys<Rational>),
    Quadratic(LinkPolys<NfElem>),
    Numeric(LinkPolys<ComplexInterval>),
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkDescriptor {
    pub kind: LinkKind,
    pub linear_form: Option<LinearFormLabel>,
    pub source: FibrationSide,
    pub target: LinkTarget,
    /// Images of the target coordinates in the source coordinates.
    pub coordinate_map: Vec<String>,
    /// A one-parameter family of which this is a sample.
    pub family: bool,
    #[serde(skip)]
    data: Option<LinkData>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ValidationKind {
    Exact,
    CertifiedNumeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkCertificate {
    pub kind: LinkKind,
    pub validation: ValidationKind,
    /// `pullback(target) = quotient * source`.
    pub quotient: String,
    pub remainder: String,
    /// Terminal links: `{xn = 0}` lands in the marked subspace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contracted_into_marked: Option<bool>,
}

// ---------------------------------------------------------------------------
// polynomials

fn source_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
    v.push("t0".into());
    v.push("t1".into());
    v
}

fn quadric_names(n: usize) -> Vec<String> {
    (0..=n + 1).map(|i| format!("y{i}")).collect()
}

fn render<S: Ring + Display>(p: &MPoly<S>, names: &[String]) -> String {
    let r: Vec<&str> = names.iter().map(String::as_str).collect();
    p.to_string_with(&r)
}

/// `x1^2 - x0 x2 + x3^2 + ... + x_{m-1}^2` in `nv` variables.
fn vertical_part<S: Ring>(m: usize, nv: usize) -> MPoly<S> {
    let x = |i| MPoly::var(nv, i);
    let mut q = &x(1) * &x(1) - &x(0) * &x(2);
    for i in 3..m {
        q = q + &x(i) * &x(i);
    }
    q
}

/// A binary form in the `t` variables of the source ring.
fn form_poly<S: Ring>(n: usize, f: &Form<S>) -> MPoly<S> {
    let nv = n + 3;
    f.to_mpoly()
        .substitute(&[MPoly::var(nv, n + 1), MPoly::var(nv, n + 2)])
}

fn fibration_poly<S: Ring>(n: usize, g: &Form<S>) -> MPoly<S> {
    let xn = MPoly::var(n + 3, n);
    vertical_part(n, n + 3) + form_poly(n, g) * xn.clone() * xn
}

fn quadric_poly<S: Ring>(n: usize) -> MPoly<S> {
    let nv = n + 2;
    vertical_part(n, nv) + MPoly::var(nv, n) * MPoly::var(nv, n + 1)
}

/// Images `x_i -> x_i * scale_x` (`i < n`), `xn -> xn * scale_n`, `t -> t`.
fn scaled_images<S: Ring>(
    n: usize,
    scale_x: Option<&Form<S>>,
    scale_n: Option<&Form<S>>,
) -> Vec<MPoly<S>> {
    let nv = n + 3;
    (0..nv)
        .map(|i| {
            let v = MPoly::var(nv, i);
            let s = if i < n {
                scale_x
            } else if i == n {
                scale_n
            } else {
                None
            };
            match s {
                Some(f) => form_poly(n, f) * v,
                None => v,
            }
        })
        .collect()
}

/// Division by a single polynomial: `f = q g + r` with no term of `r`
/// divisible by the leading monomial of `g`.
fn divide<S: Field>(f: &MPoly<S>, g: &MPoly<S>) -> (MPoly<S>, MPoly<S>) {
    let nv = f.nvars();
    let (gm, gc) = match g.lead() {
        Some((m, c)) => (m.clone(), c.clone()),
        None => return (MPoly::zero(nv), f.clone()),
    };
    let mut p = f.clone();
    let mut q = MPoly::zero(nv);
    let mut r = MPoly::zero(nv);
    while let Some((m, c)) = p.lead().map(|(m, c)| (m.clone(), c.clone())) {
        if m.iter().zip(&gm).all(|(a, b)| a >= b) {
            let t = MPoly::term(
                m.iter().zip(&gm).map(|(a, b)| a - b).collect(),
                c / gc.clone(),
            );
            p = p - &t * g;
            q = q + t;
        } else {
            let t = MPoly::term(m, c);
            p = &p - &t;
            r = r + t;
        }
    }
    (q, r)
}

/// `g / d`, if exact.
fn form_div<S: Field>(g: &Form<S>, d: &Form<S>) -> Option<Form<S>> {
    if g.is_zero() || d.is_zero() || d.degree() > g.degree() {
        return None;
    }
    // strip common t1 powers: leading zero coefficients
    let s = d.coeffs().iter().position(|c| !c.is_zero())?;
    if g.coeffs()[..s].iter().any(|c| !c.is_zero()) {
        return None;
    }
    let (gc, dc) = (&g.coeffs()[s..], &d.coeffs()[s..]);
    let qd = g.degree() - d.degree();
    let mut q: Vec<S> = Vec::with_capacity(qd + 1);
    let conv = |q: &[S], i: usize| -> S {
        (1..dc.len())
            .filter(|&j| j <= i && i - j < q.len())
            .fold(S::zero(), |acc, j| acc + dc[j].clone() * q[i - j].clone())
    };
    for i in 0..=qd {
        q.push((gc[i].clone() - conv(&q, i)) / dc[0].clone());
    }
    (qd + 1..gc.len())
        .all(|i| gc[i] == conv(&q, i))
        .then(|| Form::new(q))
}

/// `g / (t0 - r t1)` over intervals with the tail residual.
fn numeric_div(
    g: &Form<ComplexInterval>,
    r: &ComplexInterval,
) -> (Form<ComplexInterval>, ComplexInterval) {
    let d = g.degree();
    let mut h: Vec<ComplexInterval> = Vec::with_capacity(d);
    for i in 0..d {
        let prev = if i == 0 {
            ComplexInterval::zero()
        } else {
            h[i - 1].clone()
        };
        h.push((g.coeff(i) + r.clone() * prev).round_out(ROUND_BITS));
    }
    let residual = g.coeff(d) + r.clone() * h[d - 1].clone();
    (Form::new(h), residual)
}

fn strings<S: Display>(c: &[S]) -> Vec<String> {
    c.iter().map(|x| x.to_string()).collect()
}

// ---------------------------------------------------------------------------
// forms over the three scalar layers

#[derive(Clone, Debug)]
enum AnyForm {
    Rational(BinaryForm),
    Quadratic(Form<NfElem>),
    Numeric(Form<ComplexInterval>),
}

impl AnyForm {
    fn side(&self, n: usize) -> FibrationSide {
        let (field, form) = match self {
            AnyForm::Rational(f) => (LinkField::Rational, strings(f.coeffs())),
            AnyForm::Quadratic(f) => (LinkField::Quadratic, strings(f.coeffs())),
            AnyForm::Numeric(f) => (LinkField::Numeric, strings(f.coeffs())),
        };
        FibrationSide { n, field, form }
    }
}

/// A root of `g` as needed to write down `l`.
#[derive(Clone, Debug)]
enum RootLabel {
    Rational(BinaryForm),
    Quadratic(NfElem),
    Numeric(ComplexInterval),
}

fn label(root: &RootLabel, key: &str) -> LinearFormLabel {
    let (field, modulus, coefficients) = match root {
        RootLabel::Rational(l) => (
            LinkField::Rational,
            None,
            [l.coeff(0).to_string(), l.coeff(1).to_string()],
        ),
        RootLabel::Quadratic(th) => (
            LinkField::Quadratic,
            th.modulus().map(|m| strings(m.coeffs())),
            ["1".to_string(), (-th.clone()).to_string()],
        ),
        RootLabel::Numeric(r) => (
            LinkField::Numeric,
            None,
            ["1".to_string(), (-r.clone()).to_string()],
        ),
    };
    LinearFormLabel {
        field,
        modulus,
        coefficients,
        point: key.to_string(),
    }
}

fn divide_polys<S: Field + Display>(
    n: usize,
    g: &Form<S>,
    l: &Form<S>,
    h: &Form<S>,
) -> LinkPolys<S> {
    LinkPolys {
        source: fibration_poly(n, g),
        target: fibration_poly(n, h),
        images: scaled_images(n, None, Some(l)),
        quotient: MPoly::one(n + 3),
    }
}

fn map_strings<S: Ring + Display>(n: usize, images: &[MPoly<S>]) -> Vec<String> {
    let names = source_names(n);
    images.iter().map(|p| render(p, &names)).collect()
}

/// The link `X_g -> X_{g/l^2}` for a root of multiplicity >= 2 of `g`.
fn peel(n: usize, g: &AnyForm, root: &RootLabel, key: &str) -> Result<(AnyForm, LinkDescriptor)> {
    let source = g.side(n);
    let (h, data, map) = match (g, root) {
        (AnyForm::Rational(g), RootLabel::Rational(l)) => {
            let h = form_div(g, l)
                .and_then(|q| form_div(&q, l))
                .ok_or_else(not_square)?;
            let p = divide_polys(n, g, l, &h);
            let m = map_strings(n, &p.images);
            (AnyForm::Rational(h), LinkData::Rational(p), m)
        }
        (g, RootLabel::Quadratic(th)) => {
            let g = match g {
                AnyForm::Rational(g) => g.map(|c| NfElem::rational(c.clone())),
                AnyForm::Quadratic(g) => g.clone(),
                AnyForm::Numeric(_) => return Err(Error::Internal("mixed scalar layers".into())),
            };
            let l = Form::linear(NfElem::one(), -th.clone());
            let h = form_div(&g, &l)
                .and_then(|q| form_div(&q, &l))
                .ok_or_else(not_square)?;
            let p = divide_polys(n, &g, &l, &h);
            let m = map_strings(n, &p.images);
            (AnyForm::Quadratic(h), LinkData::Quadratic(p), m)
        }
        (g, RootLabel::Numeric(r)) => {
            let g = match g {
                AnyForm::Rational(g) => g.map(|c| ComplexInterval::real(c.clone())),
                AnyForm::Numeric(g) => g.clone(),
                AnyForm::Quadratic(_) => return Err(Error::Internal("mixed scalar layers".into())),
            };
            let (q, e1) = numeric_div(&g, r);
            let (h, e2) = numeric_div(&q, r);
            if !e1.contains_zero() || !e2.contains_zero() {
                return Err(not_square());
            }
            let l = Form::linear(ComplexInterval::one(), -r.clone());
            let p = LinkPolys {
                source: fibration_poly(n, &g),
                target: fibration_poly(n, &h),
                images: scaled_images(n, None, Some(&l)),
                quotient: MPoly::one(n + 3),
            };
            let m = map_strings(n, &p.images);
            (AnyForm::Numeric(h), LinkData::Numeric(p), m)
        }
        (_, RootLabel::Rational(_)) => return Err(Error::Internal("mixed scalar layers".into())),
    };
    let desc = LinkDescriptor {
        kind: LinkKind::DivideBySquare,
        linear_form: Some(label(root, key)),
        source,
        target: LinkTarget::Fibration(h.side(n)),
        coordinate_map: map,
        family: false,
        data: Some(data),
    };
    Ok((h, desc))
}

fn not_square() -> Error {
    Error::PullbackFailure {
        remainder: "l^2 does not divide the form".into(),
    }
}

fn check_linear(l: &BinaryForm) -> Result<()> {
    if l.degree() != 1 || l.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

fn point_of_linear(l: &BinaryForm) -> PointP1 {
    // a t0 + b t1 vanishes at (-b : a)
    PointP1::rational_from(&-l.coeff(1), &l.coeff(0))
}

/// The link `X_g -> X_{g/l^2}`, `xn -> l xn`. A degenerate `l` is rejected
/// with `SingularMatrix`; `l^2` not dividing `g` with `PullbackFailure`.
pub fn divide_by_square(n: usize, g: &BinaryForm, l: &BinaryForm) -> Result<LinkDescriptor> {
    check_linear(l)?;
    let key = point_of_linear(l).key();
    Ok(peel(
        n,
        &AnyForm::Rational(g.clone()),
        &RootLabel::Rational(l.clone()),
        &key,
    )?
    .1)
}

/// The link `X_g -> X_{l^2 g}`, `x_i -> l x_i` for `i < n`.
pub fn multiply_by_square(n: usize, g: &BinaryForm, l: &BinaryForm) -> Result<LinkDescriptor> {
    check_linear(l)?;
    let h = g.mul(&l.pow(2));
    let l2 = l.pow(2);
    let p = LinkPolys {
        source: fibration_poly(n, g),
        target: fibration_poly(n, &h),
        images: scaled_images(n, Some(l), None),
        quotient: form_poly(n, &l2),
    };
    let root = RootLabel::Rational(l.clone());
    Ok(LinkDescriptor {
        kind: LinkKind::MultiplyBySquare,
        linear_form: Some(label(&root, &point_of_linear(l).key())),
        source: AnyForm::Rational(g.clone()).side(n),
        target: LinkTarget::Fibration(AnyForm::Rational(h).side(n)),
        coordinate_map: map_strings(n, &p.images),
        family: true,
        data: Some(LinkData::Rational(p)),
    })
}

fn quadric_target(n: usize) -> QuadricTarget {
    QuadricTarget {
        n,
        equation: render(&quadric_poly::<Rational>(n), &quadric_names(n)),
        marked_subspace: vec![format!("y{n}"), format!("y{}", n + 1)],
    }
}

fn terminal_polys<S: Field + Display>(
    n: usize,
    g: &Form<S>,
    l0: &Form<S>,
    l1: &Form<S>,
) -> Result<LinkPolys<S>> {
    let prod = l0.mul(l1);
    let idx = (0..=2).find(|&i| !prod.coeff(i).is_zero()).unwrap();
    let c = g.coeff(idx) / prod.coeff(idx);
    if prod.scale(&c) != *g {
        return Err(Error::Internal("roots do not factor the form".into()));
    }
    let nv = n + 3;
    let xn = MPoly::var(nv, n);
    let mut images: Vec<MPoly<S>> = (0..n).map(|i| MPoly::var(nv, i)).collect();
    images.push(form_poly(n, &l0.scale(&c)) * xn.clone());
    images.push(form_poly(n, l1) * xn);
    Ok(LinkPolys {
        source: fibration_poly(n, g),
        target: quadric_poly(n),
        images,
        quotient: MPoly::one(nv),
    })
}

/// The link `X_g --> Q^n` contracting `{xn = 0}`, for `g` with exactly two
/// distinct simple roots.
pub fn terminal_to_quadric(x: &UmemuraFibration) -> Result<LinkDescriptor> {
    let (n, g) = (x.n(), x.g());
    let entries = &x.roots().entries;
    if g.degree() != 2 || entries.len() != 2 {
        return Err(Error::Internal(
            "terminal link needs two simple roots".into(),
        ));
    }
    let data = match (&entries[0].0, &entries[1].0) {
        (PointP1::Rational(_), PointP1::Rational(_)) => {
            let l0 = entries[0].0.linear_form().unwrap();
            let l1 = entries[1].0.linear_form().unwrap();
            LinkData::Rational(terminal_polys(n, g, &l0, &l1)?)
        }
        (PointP1::Algebraic(_), PointP1::Algebraic(_)) => {
            let (th, conj) = conjugate_pair(g);
            let l0 = Form::linear(NfElem::one(), -th);
            let l1 = Form::linear(NfElem::one(), -conj);
            let gq = g.map(|c| NfElem::rational(c.clone()));
            LinkData::Quadratic(terminal_polys(n, &gq, &l0, &l1)?)
        }
        _ => {
            return Err(Error::Internal(
                "a quadratic form with one rational root".into(),
            ))
        }
    };
    let (map, field) = match &data {
        LinkData::Rational(p) => (map_strings(n, &p.images), LinkField::Rational),
        LinkData::Quadratic(p) => (map_strings(n, &p.images), LinkField::Quadratic),
        LinkData::Numeric(p) => (map_strings(n, &p.images), LinkField::Numeric),
    };
    let mut source = AnyForm::Rational(g.clone()).side(n);
    source.field = field;
    Ok(LinkDescriptor {
        kind: LinkKind::TerminalToQuadric,
        linear_form: None,
        source,
        target: LinkTarget::Quadric(quadric_target(n)),
        coordinate_map: map,
        family: false,
        data: Some(data),
    })
}

/// `(th, th')`, the two roots of the irreducible quadratic `q` in `Q(th)`.
fn conjugate_pair(q: &BinaryForm) -> (NfElem, NfElem) {
    let th = NfElem::generator(&q.dehomogenize().0);
    let s = NfElem::rational(-q.coeff(1) / q.coeff(0));
    (th.clone(), s - th)
}

fn check_polys<S: Field + Display>(p: &LinkPolys<S>, names: &[String]) -> Result<String> {
    let pulled = p.target.substitute(&p.images);
    let (q, r) = divide(&pulled, &p.source);
    if !r.is_zero() {
        return Err(Error::PullbackFailure {
            remainder: render(&r, names),
        });
    }
    if q != p.quotient {
        return Err(Error::Internal("unexpected pullback quotient".into()));
    }
    Ok(render(&q, names))
}

/// Checks that the target equation pulls back into the ideal of the source
/// equation, by exact division (or interval enclosure for numeric links).
pub fn validate_link(link: &LinkDescriptor) -> Result<LinkCertificate> {
    let data = link
        .data
        .as_ref()
        .ok_or_else(|| Error::Internal("link has no coordinate map to validate".into()))?;
    let n = link.source.n;
    let names = source_names(n);
    let (validation, quotient) = match data {
        LinkData::Rational(p) => (ValidationKind::Exact, check_polys(p, &names)?),
        LinkData::Quadratic(p) => (ValidationKind::Exact, check_polys(p, &names)?),
        LinkData::Numeric(p) => {
            let diff = p.target.substitute(&p.images) - &p.quotient * &p.source;
            if diff.terms().any(|(_, c)| !c.contains_zero()) {
                return Err(Error::PullbackFailure {
                    remainder: render(&diff, &names),
                });
            }
            (
                ValidationKind::CertifiedNumeric,
                render(&p.quotient, &names),
            )
        }
    };
    let contracted_into_marked = (link.kind == LinkKind::TerminalToQuadric).then(|| {
        let divisible = |i: usize| -> bool {
            match data {
                LinkData::Rational(p) => p.images[i].var_valuation(n).is_some_and(|v| v >= 1),
                LinkData::Quadratic(p) => p.images[i].var_valuation(n).is_some_and(|v| v >= 1),
                LinkData::Numeric(p) => p.images[i].var_valuation(n).is_some_and(|v| v >= 1),
            }
        };
        divisible(n) && divisible(n + 1)
    });
    if contracted_into_marked == Some(false) {
        return Err(Error::PullbackFailure {
            remainder: "{xn = 0} is not mapped into the marked subspace".into(),
        });
    }
    Ok(LinkCertificate {
        kind: link.kind,
        validation,
        quotient,
        remainder: "0".into(),
        contracted_into_marked,
    })
}

// ---------------------------------------------------------------------------
// enumeration and reduction

/// Labeled conjugate roots, their multiplicity and minimal polynomial.
type RootGroup = (Vec<(RootLabel, String)>, u32, BinaryForm);

/// Roots grouped by minimal polynomial, each with its multiplicity, labeled
/// for writing down linear forms.
fn labeled_roots(x: &UmemuraFibration, cap: u32) -> Result<Vec<RootGroup>> {
    let mut groups: Vec<RootGroup> = Vec::new();
    for (pt, k) in &x.roots().entries {
        match pt {
            PointP1::Rational(_) => {
                let l = pt.linear_form().unwrap();
                groups.push((vec![(RootLabel::Rational(l.clone()), pt.key())], *k, l));
            }
            PointP1::Algebraic(a) => {
                let p = &a.minimal_polynomial;
                if groups.iter().any(|(_, _, q)| q == p) {
                    continue;
                }
                let roots = if p.degree() == 2 {
                    let (th, conj) = conjugate_pair(p);
                    let keys: Vec<String> = x
                        .roots()
                        .entries
                        .iter()
                        .filter(|(q, _)| matches!(q, PointP1::Algebraic(b) if &b.minimal_polynomial == p))
                        .map(|(q, _)| q.key())
                        .collect();
                    vec![
                        (RootLabel::Quadratic(th), keys[0].clone()),
                        (RootLabel::Quadratic(conj), keys[1].clone()),
                    ]
                } else {
                    isolate_to_width(&p.dehomogenize().0, NUMERIC_BITS, cap)?
                        .into_iter()
                        .map(|b| {
                            let key =
                                format!("root of [{}] in {}", p.coefficient_strings().join(","), b);
                            (RootLabel::Numeric(b), key)
                        })
                        .collect()
                };
                groups.push((roots, *k, p.clone()));
            }
        }
    }
    Ok(groups)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkEnumeration {
    pub links: Vec<LinkDescriptor>,
    /// The list is provably complete (`a >= 2` and more than two roots).
    pub exhaustive: bool,
}

pub fn enumerate_links(x: &UmemuraFibration, cap: u32) -> Result<LinkEnumeration> {
    let n = x.n();
    let g = x.g();
    if g.is_constant() {
        let side = AnyForm::Rational(g.clone()).side(n);
        return Ok(LinkEnumeration {
            links: vec![LinkDescriptor {
                kind: LinkKind::ProductNoLinks,
                linear_form: None,
                source: side.clone(),
                target: LinkTarget::Fibration(side),
                coordinate_map: Vec::new(),
                family: false,
                data: None,
            }],
            exhaustive: false,
        });
    }
    let mut links = Vec::new();
    for (roots, k, _) in labeled_roots(x, cap)? {
        if k < 2 {
            continue;
        }
        for (root, key) in &roots {
            links.push(peel(n, &AnyForm::Rational(g.clone()), root, key)?.1);
        }
    }
    links.push(multiply_by_square(n, g, &Form::t0())?);
    if g.degree() == 2 && x.distinct_roots() == 2 {
        links.push(terminal_to_quadric(x)?);
    }
    Ok(LinkEnumeration {
        links,
        exhaustive: x.a() >= 2 && x.distinct_roots() > 2,
    })
}

/// `X_h` with `g = c f^2 h` and the chain of square-dividing links from `X_g`,
/// one per root and per peeled square, in canonical root order.
pub fn squarefree_model(
    x: &UmemuraFibration,
    cap: u32,
) -> Result<(UmemuraFibration, Vec<LinkDescriptor>)> {
    let n = x.n();
    let mut current = x.g().clone();
    let mut chain = Vec::new();
    for (roots, k, p) in labeled_roots(x, cap)? {
        let times = k / 2;
        if times == 0 {
            continue;
        }
        let mut form = AnyForm::Rational(current.clone());
        for (root, key) in &roots {
            for _ in 0..times {
                let (next, link) = peel(n, &form, root, key)?;
                chain.push(link);
                form = next;
            }
        }
        // peeling a full Galois orbit lands back over Q; the peeled factors
        // are monic in t0, so the result is g / p^(2 times) times lead(p)^(2 times)
        let exact = form_div_power(&current, &p, 2 * times)
            .ok_or_else(|| Error::Internal("square part does not divide".into()))?;
        current = match &form {
            AnyForm::Rational(f) => f.clone(),
            _ => {
                let exact = exact.scale(&num_traits::pow(p.coeff(0), 2 * times as usize));
                if let AnyForm::Quadratic(f) = &form {
                    let back: Option<Vec<Rational>> =
                        f.coeffs().iter().map(NfElem::as_rational).collect();
                    if back.map(Form::new) != Some(exact.clone()) {
                        return Err(Error::Internal("peeled form is not rational".into()));
                    }
                }
                exact
            }
        };
    }
    let dec = x.g().squarefree_decompose()?;
    if current.canonical() != dec.h {
        return Err(Error::Internal(
            "reduction disagrees with the squarefree part".into(),
        ));
    }
    Ok((build_fibration(n, &current, cap)?, chain))
}

fn form_div_power(g: &BinaryForm, p: &BinaryForm, e: u32) -> Option<BinaryForm> {
    form_div(g, &p.pow(e))
}

// ---------------------------------------------------------------------------
// maximality and conjugacy

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Maximality {
    Maximal,
    NotMaximal,
}

/// Whether the verdict is the squarefree case read off directly, or the
/// extension to non-squarefree forms by comparing automorphism groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecisionBasis {
    SquarefreeDirect,
    ExtendedCaseAnalysis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MaximalityReason {
    /// `g` constant: `P^1 x Q`.
    ConstantForm,
    /// `h` has at least four roots; `Aut°(Q_g)` is conjugate to `Aut°(Q_h)`.
    AtLeastFourRoots,
    /// `h` has two roots and `Q_h` links to the smooth quadric.
    TwoRootsLinkToQuadric,
    /// `g` nonconstant with constant `h`: conjugate into the product.
    SquareOfForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupDimensions {
    /// `dim Aut°(Q_g)`.
    pub source: usize,
    /// The group of the model it is conjugated into, and its dimension.
    pub container: String,
    pub container_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MaximalityCertificate {
    pub chain: Vec<LinkDescriptor>,
    pub reason: MaximalityReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_link: Option<LinkDescriptor>,
    pub group_dimensions: GroupDimensions,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MaximalityVerdict {
    pub verdict: Maximality,
    pub squarefree_model: FormJson,
    pub distinct_roots_of_h: usize,
    pub certificate: MaximalityCertificate,
    pub basis: DecisionBasis,
}

fn so_dim(m: usize) -> usize {
    m * (m - 1) / 2
}

fn aut_dimension(x: &UmemuraFibration) -> usize {
    let n = x.n();
    match automorphism_profile(x).horizontal {
        // P^1 x (rank n+1 quadric)
        HorizontalPart::FullPgl2 => 3 + so_dim(n + 1),
        HorizontalPart::OneParameter { .. } => so_dim(n) + 1,
        HorizontalPart::Trivial => so_dim(n),
    }
}

pub fn decide_maximality(x: &UmemuraFibration, cap: u32) -> Result<MaximalityVerdict> {
    let n = x.n();
    let (xh, chain) = squarefree_model(x, cap)?;
    let roots_h = xh.distinct_roots();
    let basis = if chain.is_empty() {
        DecisionBasis::SquarefreeDirect
    } else {
        DecisionBasis::ExtendedCaseAnalysis
    };
    let source = aut_dimension(x);
    let (verdict, reason, terminal_link, container, container_dimension) = if x.g().is_constant() {
        (
            Maximality::Maximal,
            MaximalityReason::ConstantForm,
            None,
            format!("PGL_2 x SO_{}", n + 1),
            source,
        )
    } else if xh.g().is_constant() {
        (
            Maximality::NotMaximal,
            MaximalityReason::SquareOfForm,
            None,
            format!("PGL_2 x SO_{}", n + 1),
            aut_dimension(&xh),
        )
    } else if roots_h >= 4 {
        (
            Maximality::Maximal,
            MaximalityReason::AtLeastFourRoots,
            None,
            format!("SO_{n}"),
            aut_dimension(&xh),
        )
    } else {
        (
            Maximality::NotMaximal,
            MaximalityReason::TwoRootsLinkToQuadric,
            Some(terminal_to_quadric(&xh)?),
            format!("SO_{}", n + 2),
            so_dim(n + 2),
        )
    };
    let strict = container_dimension > source;
    if (verdict == Maximality::NotMaximal) != strict {
        return Err(Error::Internal(
            "group dimensions contradict the verdict".into(),
        ));
    }
    Ok(MaximalityVerdict {
        verdict,
        squarefree_model: xh.g().to_json(),
        distinct_roots_of_h: roots_h,
        certificate: MaximalityCertificate {
            chain,
            reason,
            terminal_link,
            group_dimensions: GroupDimensions {
                source,
                container,
                container_dimension,
            },
        },
        basis,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjugacyVerdict {
    pub equivalence: EquivalenceVerdict,
    pub models: [FormJson; 2],
    pub chains: [Vec<LinkDescriptor>; 2],
}

/// Reduces both sides to squarefree models and compares those up to `PGL_2`.
pub fn are_conjugate(
    x: &UmemuraFibration,
    y: &UmemuraFibration,
    cap: u32,
) -> Result<ConjugacyVerdict> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: y.n(),
        });
    }
    let (xh, cx) = squarefree_model(x, cap)?;
    let (yh, cy) = squarefree_model(y, cap)?;
    let equivalence = find_mobius_witness(xh.g(), yh.g(), cap)?;
    Ok(ConjugacyVerdict {
        equivalence,
        models: [xh.g().to_json(), yh.g().to_json()],
        chains: [cx, cy],
    })
}

/// Deduplication key of the link graph: `n`, a fingerprint of the squarefree
/// model, and the degrees of the squared primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkGraphKey {
    pub n: usize,
    pub model_fingerprint: String,
    pub squared_degrees: Vec<usize>,
}

pub fn link_graph_key(x: &UmemuraFibration, cap: u32) -> Result<LinkGraphKey> {
    let (xh, _) = squarefree_model(x, cap)?;
    let model_fingerprint = if xh.distinct_roots() >= 4 {
        serde_json::to_string(&cross_ratio_fingerprint(xh.roots(), cap)?)
            .map_err(|e| Error::Internal(e.to_string()))?
    } else {
        format!("{} roots", xh.distinct_roots())
    };
    let (_, factors) = x.g().factor()?;
    let mut squared_degrees: Vec<usize> = factors
        .iter()
        .flat_map(|(p, e)| std::iter::repeat_n(p.degree(), (e / 2) as usize))
        .collect();
    squared_degrees.sort_unstable();
    Ok(LinkGraphKey {
        n: x.n(),
        model_fingerprint,
        squared_degrees,
    })
}
