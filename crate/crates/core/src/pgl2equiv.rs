//! PGL2-equivalence of squarefree binary forms.
//!
//! A witness `alpha` always satisfies `h' o alpha = lambda * h`; as a map of
//! `P^1` it sends the roots of `h` onto the roots of `h'`. Decisions are exact
//! when all roots live in `Q` or in one common quadratic field, and certified
//! by interval arithmetic otherwise.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::binform::{BinaryForm, Form, PointP1, RootDivisor};
use crate::error::{Error, Result};
use crate::interval::ComplexInterval;
use crate::mobius::Mobius;
use crate::numfield::NfElem;
use crate::poly::Poly;
use crate::ratfunc::SquareClass;
use crate::roots::isolate_to_width;
use crate::scalar::{Field, Rational, Ring};

/// Fields with exact equality and a canonical sort key.
pub trait ExactField: Field + std::fmt::Display {
    fn sort_key(&self) -> Vec<Rational>;
}

impl ExactField for Rational {
    fn sort_key(&self) -> Vec<Rational> {
        vec![self.clone()]
    }
}

impl ExactField for NfElem {
    fn sort_key(&self) -> Vec<Rational> {
        self.rep().coeffs().to_vec()
    }
}

type Pt<S> = (S, S);

fn bracket<S: Ring>(a: &Pt<S>, b: &Pt<S>) -> S {
    a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone()
}

/// `j(lambda) = 256 (lambda^2 - lambda + 1)^3 / (lambda^2 (lambda - 1)^2)` for
/// the cross-ratio `lambda` of four distinct points in the given order.
pub fn j_invariant<S: Field>(a: &Pt<S>, b: &Pt<S>, c: &Pt<S>, d: &Pt<S>) -> S {
    let lam = bracket(a, c) * bracket(b, d) / (bracket(a, d) * bracket(b, c));
    let one = S::one();
    let num = (lam.clone() * lam.clone() - lam.clone() + one.clone()).pow_u32(3) * S::from_i64(256);
    let den = lam.clone() * lam.clone() * (lam.clone() - one.clone()) * (lam - one);
    num / den
}

/// `j` of every 4-element subset, sorted canonically.
pub fn j_invariants<S: ExactField>(pts: &[Pt<S>]) -> Vec<S> {
    let n = pts.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push(j_invariant(&pts[a], &pts[b], &pts[c], &pts[d]));
                }
            }
        }
    }
    out.sort_by_key(|x| x.sort_key());
    out
}

/// Roots of a squarefree divisor as exact points: rational ones, then the
/// conjugate pairs of quadratic factors, all in one field `Q(sqrt(d0))`.
#[derive(Clone, Debug)]
enum ExactRoots {
    Rational(Vec<Pt<Rational>>),
    Quadratic { d0: Rational, pts: Vec<Pt<NfElem>> },
}

fn rational_points(d: &RootDivisor) -> Vec<Pt<Rational>> {
    d.points().filter_map(PointP1::as_rational).collect()
}

fn quadratic_factors(d: &RootDivisor) -> Option<Vec<BinaryForm>> {
    let mut out: Vec<BinaryForm> = Vec::new();
    for p in d.points() {
        if let PointP1::Algebraic(a) = p {
            if a.minimal_polynomial.degree() != 2 {
                return None;
            }
            if !out.contains(&a.minimal_polynomial) {
                out.push(a.minimal_polynomial.clone());
            }
        }
    }
    Some(out)
}

/// Square class of the discriminant of `a t0^2 + b t0 t1 + c t1^2`.
fn discriminant_class(q: &BinaryForm) -> (Rational, Rational) {
    let (a, b, c) = (q.coeff(0), q.coeff(1), q.coeff(2));
    (b.clone() * b - Rational::from_i64(4) * a * c).square_class()
}

fn exact_roots(d: &RootDivisor) -> Option<ExactRoots> {
    let quads = quadratic_factors(d)?;
    let rational = rational_points(d);
    if quads.is_empty() {
        return Some(ExactRoots::Rational(rational));
    }
    let d0 = discriminant_class(&quads[0]).0;
    if quads.iter().any(|q| discriminant_class(q).0 != d0) {
        return None;
    }
    let modulus = Arc::new(Poly::new(vec![
        -d0.clone(),
        Rational::zero(),
        Rational::one(),
    ]));
    Some(ExactRoots::Quadratic {
        d0,
        pts: lift_points(&rational, &quads, &modulus),
    })
}

fn lift_points(
    rational: &[Pt<Rational>],
    quads: &[BinaryForm],
    modulus: &Arc<Poly<Rational>>,
) -> Vec<Pt<NfElem>> {
    let th = NfElem::from_poly(Poly::x(), Some(modulus.clone()));
    let mut pts: Vec<Pt<NfElem>> = rational
        .iter()
        .map(|(p, q)| (NfElem::rational(p.clone()), NfElem::rational(q.clone())))
        .collect();
    for q in quads {
        let (a, b) = (q.coeff(0), q.coeff(1));
        let r = discriminant_class(q).1;
        let two_a = NfElem::rational(Rational::from_i64(2) * a);
        for sign in [1, -1] {
            let x = (NfElem::rational(-b.clone())
                + th.clone() * NfElem::rational(r.clone() * Rational::from_i64(sign)))
                / two_a.clone();
            pts.push((x, NfElem::one()));
        }
    }
    pts
}

/// The modulus shared by a list of field elements, if any is irrational.
fn common_modulus(pts: &[Pt<NfElem>]) -> Option<Arc<Poly<Rational>>> {
    pts.iter()
        .flat_map(|(a, b)| [a, b])
        .find_map(|x| x.modulus().map(|m| Arc::new(m.clone())))
}

/// Canonical fingerprint of a squarefree root divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Fingerprint {
    /// Exact values; `field` is `d0` when they live in `Q(sqrt(d0))`.
    Exact {
        field: Option<String>,
        values: Vec<String>,
    },
    /// Enclosures of the values at the stated precision.
    Approximate { bits: u32, values: Vec<String> },
}

fn check_divisor(d: &RootDivisor) -> Result<()> {
    if d.entries.iter().any(|(_, m)| *m > 1) {
        return Err(Error::NotSquarefree);
    }
    if d.distinct_count() < 4 {
        return Err(Error::TooFewPoints {
            count: d.distinct_count(),
        });
    }
    Ok(())
}

/// Multiset of `j`-invariants of all 4-point subsets of the roots.
pub fn cross_ratio_fingerprint(d: &RootDivisor, cap: u32) -> Result<Fingerprint> {
    check_divisor(d)?;
    match exact_roots(d) {
        Some(ExactRoots::Rational(pts)) => Ok(Fingerprint::Exact {
            field: None,
            values: j_invariants(&pts).iter().map(|x| x.to_string()).collect(),
        }),
        Some(ExactRoots::Quadratic { d0, pts }) => Ok(Fingerprint::Exact {
            field: Some(d0.to_string()),
            values: j_invariants(&pts).iter().map(|x| x.to_string()).collect(),
        }),
        None => {
            let bits = 64;
            let pts = numeric_points(d, bits, cap)?;
            let mut values = Vec::new();
            let n = pts.len();
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        for e in c + 1..n {
                            let v = numeric_j(&pts[a], &pts[b], &pts[c], &pts[e], bits)
                                .ok_or(Error::PrecisionExhausted { cap })?;
                            values.push(v);
                        }
                    }
                }
            }
            values.sort_by(crate::roots::cmp_box);
            Ok(Fingerprint::Approximate {
                bits,
                values: values.iter().map(|v| v.to_string()).collect(),
            })
        }
    }
}

fn numeric_j(
    a: &Pt<ComplexInterval>,
    b: &Pt<ComplexInterval>,
    c: &Pt<ComplexInterval>,
    d: &Pt<ComplexInterval>,
    bits: u32,
) -> Option<ComplexInterval> {
    let lam = (bracket(a, c) * bracket(b, d))
        .checked_div(&(bracket(a, d) * bracket(b, c)))?
        .round_out(bits);
    let one = ComplexInterval::one();
    let num = (lam.clone() * lam.clone() - lam.clone() + one.clone()).pow_u32(3)
        * ComplexInterval::from_i64(256);
    let den = lam.clone() * lam.clone() * (lam.clone() - one.clone()) * (lam - one);
    Some(num.checked_div(&den)?.round_out(bits))
}

// ---------------------------------------------------------------------------
// Witnesses

/// An invertible `2x2` matrix up to scalar, over the field its entries need.
#[derive(Clone, Debug, PartialEq)]
pub enum MobiusWitness {
    Rational(Mobius<Rational>),
    /// Entries in `Q(th)`, `th` a root of the stated monic quadratic.
    Quadratic(Mobius<NfElem>),
    /// Enclosures of the entries.
    Numeric(Mobius<ComplexInterval>),
}

#[derive(Serialize)]
struct WitnessJson {
    field: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<Vec<String>>,
    entries: [String; 4],
}

impl Serialize for MobiusWitness {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let strs = |e: [String; 4]| e;
        let j = match self {
            MobiusWitness::Rational(m) => WitnessJson {
                field: "rational",
                modulus: None,
                entries: strs(m.normalized().entries().map(|x| x.to_string())),
            },
            MobiusWitness::Quadratic(m) => WitnessJson {
                field: "quadratic",
                modulus: m.entries().iter().find_map(|x| {
                    x.modulus()
                        .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
                }),
                entries: strs(m.normalized().entries().map(|x| x.to_string())),
            },
            MobiusWitness::Numeric(m) => WitnessJson {
                field: "numeric",
                modulus: None,
                entries: strs(m.entries().map(|x| x.to_string())),
            },
        };
        j.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictResult {
    Equivalent,
    Inequivalent,
    UndecidedAtPrecision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    /// `h' o alpha = lambda h` checked coefficient by coefficient.
    ExactWitness,
    /// Different fingerprints (or degrees).
    FingerprintSeparation,
    /// Equal fingerprints, but the exact search over all triple assignments
    /// found no map.
    ExhaustiveSearch,
    /// Interval arithmetic: all other candidates excluded, the witness
    /// consistent with the identity at the stated precision.
    CertifiedNumeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceVerdict {
    pub result: VerdictResult,
    pub certificate_kind: Option<CertificateKind>,
    pub witness: Option<MobiusWitness>,
    pub lambda: Option<String>,
    pub fingerprints: Option<[Fingerprint; 2]>,
    /// Whether every assignment of a fixed triple of roots was tried.
    pub exhaustive_search: bool,
    pub precision_bits: Option<u32>,
}

impl EquivalenceVerdict {
    fn new(result: VerdictResult, kind: Option<CertificateKind>) -> Self {
        EquivalenceVerdict {
            result,
            certificate_kind: kind,
            witness: None,
            lambda: None,
            fingerprints: None,
            exhaustive_search: false,
            precision_bits: None,
        }
    }
}

/// `lambda` with `lhs = lambda * rhs`, if the forms are proportional.
fn proportionality<S: Field>(lhs: &Form<S>, rhs: &Form<S>) -> Option<S> {
    if lhs.degree() != rhs.degree() || lhs.is_zero() || rhs.is_zero() {
        return None;
    }
    let i = rhs.coeffs().iter().position(|c| !c.is_zero())?;
    let lam = lhs.coeff(i) / rhs.coeff(i);
    (lhs == &rhs.scale(&lam)).then_some(lam)
}

/// Whether `h' o alpha` is a nonzero multiple of `h`, and the multiple.
pub fn verify_witness_exact<S: Field>(
    h: &Form<S>,
    h2: &Form<S>,
    alpha: &Mobius<S>,
) -> Result<Option<S>> {
    let pulled = h2.substitute_mobius(alpha)?;
    Ok(proportionality(&pulled, h))
}

/// Verification result: `Some(lambda)` when the identity holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub holds: Option<bool>,
    pub lambda: Option<String>,
}

/// `h' o alpha = lambda h` for any kind of witness. Numeric witnesses yield
/// `holds = None` unless the identity is refuted by the enclosures.
pub fn verify_witness(
    h: &BinaryForm,
    h2: &BinaryForm,
    alpha: &MobiusWitness,
) -> Result<WitnessCheck> {
    match alpha {
        MobiusWitness::Rational(m) => {
            let lam = verify_witness_exact(h, h2, m)?;
            Ok(WitnessCheck {
                holds: Some(lam.is_some()),
                lambda: lam.map(|l| l.to_string()),
            })
        }
        MobiusWitness::Quadratic(m) => {
            let lift = |f: &BinaryForm| f.map(|c| NfElem::rational(c.clone()));
            let lam = verify_witness_exact(&lift(h), &lift(h2), m)?;
            Ok(WitnessCheck {
                holds: Some(lam.is_some()),
                lambda: lam.map(|l| l.to_string()),
            })
        }
        MobiusWitness::Numeric(m) => {
            if m.det().contains_zero() {
                return Err(Error::SingularMatrix);
            }
            let lift = |f: &BinaryForm| f.map(|c| ComplexInterval::real(c.clone()));
            let pulled = substitute_rounded(&lift(h2), m, 256);
            let consistent = numeric_proportional(&pulled, &lift(h));
            Ok(WitnessCheck {
                holds: if consistent { None } else { Some(false) },
                lambda: None,
            })
        }
    }
}

/// Whether `lhs` may be proportional to `rhs` given the enclosures.
fn numeric_proportional(lhs: &Form<ComplexInterval>, rhs: &Form<ComplexInterval>) -> bool {
    let Some(i) = rhs.coeffs().iter().position(|c| !c.contains_zero()) else {
        return true;
    };
    let Some(lam) = lhs.coeff(i).checked_div(&rhs.coeff(i)) else {
        return true;
    };
    lhs.coeffs()
        .iter()
        .zip(rhs.coeffs())
        .all(|(a, b)| (a.clone() - lam.clone() * b.clone()).contains_zero())
}

/// Matrix sending `e0, e1, e0 + e1` to multiples of `p0, p1, p2`.
fn frame<S: Ring>(p: &[Pt<S>; 3]) -> Mobius<S> {
    let c0 = bracket(&p[2], &p[1]);
    let c1 = bracket(&p[0], &p[2]);
    Mobius::new(
        c0.clone() * p[0].0.clone(),
        c1.clone() * p[1].0.clone(),
        c0 * p[0].1.clone(),
        c1 * p[1].1.clone(),
    )
}

/// The map sending `p_i` to `q_i` (up to scalar).
fn triple_map<S: Ring>(p: &[Pt<S>; 3], q: &[Pt<S>; 3]) -> Mobius<S> {
    frame(q).compose(&frame(p).adjugate())
}

/// Points of `P^1` used to pad short root lists; disjoint from `avoid`.
fn padding<S: Field>(avoid: &[Pt<S>], count: usize) -> Vec<Pt<S>> {
    let mut out = Vec::new();
    let mut i = 0i64;
    while out.len() < count {
        let cand: Pt<S> = match i {
            0 => (S::zero(), S::one()),
            1 => (S::one(), S::zero()),
            _ => (S::from_i64(i - 1), S::one()),
        };
        i += 1;
        if avoid
            .iter()
            .chain(&out)
            .all(|a| !bracket(a, &cand).is_zero())
        {
            out.push(cand);
        }
    }
    out
}

/// Exhaustive exact search. `None` when no map exists.
fn exact_search<S: ExactField>(
    h: &Form<S>,
    h2: &Form<S>,
    p: &[Pt<S>],
    q: &[Pt<S>],
) -> Option<(Mobius<S>, S)> {
    let n = p.len();
    if n != q.len() {
        return None;
    }
    if n < 3 {
        // Any two sets of at most two points are equivalent: pad and map.
        let mut src = p.to_vec();
        src.extend(padding(p, 3 - n));
        let mut dst = q.to_vec();
        dst.extend(padding(q, 3 - n));
        let alpha = triple_map(
            &[src[0].clone(), src[1].clone(), src[2].clone()],
            &[dst[0].clone(), dst[1].clone(), dst[2].clone()],
        );
        let lam = verify_witness_exact(h, h2, &alpha).ok().flatten()?;
        return Some((alpha, lam));
    }
    let src = [p[0].clone(), p[1].clone(), p[2].clone()];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let alpha = triple_map(&src, &[q[i].clone(), q[j].clone(), q[k].clone()]);
                let maps_roots = p[3..].iter().all(|r| {
                    let img = alpha.apply(&r.0, &r.1);
                    q.iter().any(|t| bracket(&img, t).is_zero())
                });
                if !maps_roots {
                    continue;
                }
                if let Some(lam) = verify_witness_exact(h, h2, &alpha).ok().flatten() {
                    return Some((alpha, lam));
                }
            }
        }
    }
    None
}

/// Exact witness between two irreducible quadratics whose roots live in
/// different quadratic fields: complete the square on both sides and rescale
/// `t1` by `sqrt(D / D')`.
fn quadratic_pair_witness(h: &BinaryForm, h2: &BinaryForm) -> Option<(Mobius<NfElem>, NfElem)> {
    let reduce = |q: &BinaryForm| {
        let (a, b, c) = (q.coeff(0), q.coeff(1), q.coeff(2));
        let beta = Mobius::new(
            Rational::one(),
            -b.clone() / (Rational::from_i64(2) * a.clone()),
            Rational::zero(),
            Rational::one(),
        );
        // q o beta = a (t0^2 - D t1^2), D = (b^2 - 4ac) / (4a^2).
        let d = (b.clone() * b - Rational::from_i64(4) * a.clone() * c)
            / (Rational::from_i64(4) * a.clone() * a);
        (beta, d)
    };
    let (beta, d) = reduce(h);
    let (beta2, d2) = reduce(h2);
    let (mu, r) = (d.clone() * d2.clone()).square_class();
    // s^2 = D / D' = D D' / D'^2.
    let s = if mu == Rational::one() {
        NfElem::rational(r / d2)
    } else {
        let m = Poly::new(vec![-mu, Rational::zero(), Rational::one()]);
        NfElem::generator(&m) * NfElem::rational(r / d2)
    };
    let lift = |m: &Mobius<Rational>| m.map(|x| NfElem::rational(x.clone()));
    let gamma = Mobius::new(NfElem::one(), NfElem::zero(), NfElem::zero(), s);
    let alpha = lift(&beta2)
        .compose(&gamma)
        .compose(&lift(&beta.inverse()?));
    let up = |f: &BinaryForm| f.map(|c| NfElem::rational(c.clone()));
    let lam = verify_witness_exact(&up(h), &up(h2), &alpha)
        .ok()
        .flatten()?;
    Some((alpha, lam))
}

/// Decide whether `h' = lambda * h o beta` for some invertible `beta`, i.e.
/// whether the root sets are Möbius-equivalent.
pub fn find_mobius_witness(
    h: &BinaryForm,
    h2: &BinaryForm,
    cap: u32,
) -> Result<EquivalenceVerdict> {
    if !h.is_squarefree() || !h2.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    if h.degree() != h2.degree() {
        return Ok(EquivalenceVerdict::new(
            VerdictResult::Inequivalent,
            Some(CertificateKind::FingerprintSeparation),
        ));
    }
    let d1 = h.root_divisor(cap)?;
    let d2 = h2.root_divisor(cap)?;
    let exact = (exact_roots(&d1), exact_roots(&d2));
    let n = d1.distinct_count();

    let mut verdict = EquivalenceVerdict::new(VerdictResult::Inequivalent, None);
    if n >= 4 {
        let f1 = cross_ratio_fingerprint(&d1, cap)?;
        let f2 = cross_ratio_fingerprint(&d2, cap)?;
        let comparable = matches!((&f1, &f2), (Fingerprint::Exact { field: a, .. }, Fingerprint::Exact { field: b, .. }) if a == b);
        let differ = comparable && f1 != f2;
        verdict.fingerprints = Some([f1, f2]);
        if differ {
            verdict.certificate_kind = Some(CertificateKind::FingerprintSeparation);
            // The search is cheap; run it so that the separation is confirmed.
            verdict.exhaustive_search = true;
            if let Some(v) = exact_decision(h, h2, &exact)? {
                if v.result != VerdictResult::Inequivalent {
                    return Err(Error::Internal(
                        "fingerprints differ but a witness exists".into(),
                    ));
                }
            }
            return Ok(verdict);
        }
    }
    if let Some(mut v) = exact_decision(h, h2, &exact)? {
        v.fingerprints = verdict.fingerprints;
        return Ok(v);
    }
    if n == 2 {
        if let Some((alpha, lam)) = quadratic_pair_witness(h, h2) {
            let mut v = EquivalenceVerdict::new(
                VerdictResult::Equivalent,
                Some(CertificateKind::ExactWitness),
            );
            v.witness = Some(MobiusWitness::Quadratic(alpha));
            v.lambda = Some(lam.to_string());
            return Ok(v);
        }
        return Err(Error::Internal("quadratic witness failed".into()));
    }
    let mut v = numeric_decision(h, h2, &d1, &d2, cap)?;
    v.fingerprints = verdict.fingerprints;
    Ok(v)
}

/// Exact search when both root sets live in a common field.
fn exact_decision(
    h: &BinaryForm,
    h2: &BinaryForm,
    exact: &(Option<ExactRoots>, Option<ExactRoots>),
) -> Result<Option<EquivalenceVerdict>> {
    let finish = |found: Option<(MobiusWitness, String)>| {
        let mut v = match found {
            Some((w, lam)) => {
                let mut v = EquivalenceVerdict::new(
                    VerdictResult::Equivalent,
                    Some(CertificateKind::ExactWitness),
                );
                v.witness = Some(w);
                v.lambda = Some(lam);
                v
            }
            None => EquivalenceVerdict::new(
                VerdictResult::Inequivalent,
                Some(CertificateKind::ExhaustiveSearch),
            ),
        };
        v.exhaustive_search = true;
        v
    };
    match exact {
        (Some(ExactRoots::Rational(p)), Some(ExactRoots::Rational(q))) => {
            let found =
                exact_search(h, h2, p, q).map(|(a, l)| (MobiusWitness::Rational(a), l.to_string()));
            Ok(Some(finish(found)))
        }
        (Some(a), Some(b)) => {
            let (pa, da) = nf_points(a);
            let (pb, db) = nf_points(b);
            if da.is_some() && db.is_some() && da != db {
                return Ok(None);
            }
            // Lift lone rational points into the common field.
            let modulus = common_modulus(&pa).or_else(|| common_modulus(&pb));
            let fix = |pts: Vec<Pt<NfElem>>| -> Vec<Pt<NfElem>> {
                pts.into_iter()
                    .map(|(x, y)| {
                        (
                            NfElem::from_poly(x.rep().clone(), modulus.clone()),
                            NfElem::from_poly(y.rep().clone(), modulus.clone()),
                        )
                    })
                    .collect()
            };
            let up = |f: &BinaryForm| f.map(|c| NfElem::rational(c.clone()));
            let found = exact_search(&up(h), &up(h2), &fix(pa), &fix(pb));
            let found = found.map(|(a, l)| {
                let w = match a
                    .entries()
                    .iter()
                    .map(NfElem::as_rational)
                    .collect::<Option<Vec<_>>>()
                {
                    Some(e) => MobiusWitness::Rational(Mobius::new(
                        e[0].clone(),
                        e[1].clone(),
                        e[2].clone(),
                        e[3].clone(),
                    )),
                    None => MobiusWitness::Quadratic(a),
                };
                (w, l.to_string())
            });
            Ok(Some(finish(found)))
        }
        _ => Ok(None),
    }
}

fn nf_points(r: &ExactRoots) -> (Vec<Pt<NfElem>>, Option<Rational>) {
    match r {
        ExactRoots::Rational(p) => (
            p.iter()
                .map(|(a, b)| (NfElem::rational(a.clone()), NfElem::rational(b.clone())))
                .collect(),
            None,
        ),
        ExactRoots::Quadratic { d0, pts } => (pts.clone(), Some(d0.clone())),
    }
}

// ---------------------------------------------------------------------------
// Interval path

fn numeric_points(d: &RootDivisor, bits: u32, cap: u32) -> Result<Vec<Pt<ComplexInterval>>> {
    let mut pts: Vec<Pt<ComplexInterval>> = rational_points(d)
        .into_iter()
        .map(|(p, q)| (ComplexInterval::real(p), ComplexInterval::real(q)))
        .collect();
    let mut seen: Vec<&BinaryForm> = Vec::new();
    for p in d.points() {
        if let PointP1::Algebraic(a) = p {
            if seen.contains(&&a.minimal_polynomial) {
                continue;
            }
            seen.push(&a.minimal_polynomial);
            let boxes = isolate_to_width(&a.minimal_polynomial.dehomogenize().0, bits, cap)?;
            pts.extend(boxes.into_iter().map(|b| (b, ComplexInterval::one())));
        }
    }
    Ok(pts)
}

/// `f o m` with every intermediate coefficient rounded outward.
fn substitute_rounded(
    f: &Form<ComplexInterval>,
    m: &Mobius<ComplexInterval>,
    bits: u32,
) -> Form<ComplexInterval> {
    let d = f.degree();
    let rmul = |a: &Form<ComplexInterval>, b: &Form<ComplexInterval>| {
        Form::new(
            a.mul(b)
                .coeffs()
                .iter()
                .map(|c| c.round_out(bits))
                .collect(),
        )
    };
    let l0 = Form::linear(m.m[0][0].clone(), m.m[0][1].clone());
    let l1 = Form::linear(m.m[1][0].clone(), m.m[1][1].clone());
    let mut p0 = vec![Form::one()];
    let mut p1 = vec![Form::one()];
    for e in 1..=d {
        p0.push(rmul(&p0[e - 1], &l0));
        p1.push(rmul(&p1[e - 1], &l1));
    }
    let mut acc = vec![ComplexInterval::zero(); d + 1];
    for (i, c) in f.coeffs().iter().enumerate() {
        let t = rmul(&p0[d - i], &p1[i]);
        for (k, x) in t.coeffs().iter().enumerate() {
            acc[k] = (acc[k].clone() + c.clone() * x.clone()).round_out(bits);
        }
    }
    Form::new(acc)
}

fn round_pt(p: Pt<ComplexInterval>, bits: u32) -> Pt<ComplexInterval> {
    (p.0.round_out(bits), p.1.round_out(bits))
}

fn numeric_decision(
    h: &BinaryForm,
    h2: &BinaryForm,
    d1: &RootDivisor,
    d2: &RootDivisor,
    cap: u32,
) -> Result<EquivalenceVerdict> {
    let n = d1.distinct_count();
    let mut bits = 64;
    loop {
        let p = numeric_points(d1, bits, cap)?;
        let q = numeric_points(d2, bits, cap)?;
        let src = [p[0].clone(), p[1].clone(), p[2].clone()];
        let mut survivors = 0;
        let mut found: Option<Mobius<ComplexInterval>> = None;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let alpha = triple_map(&src, &[q[i].clone(), q[j].clone(), q[k].clone()])
                        .map(|x| x.round_out(bits));
                    let mut unique = true;
                    let mut excluded = false;
                    let mut hit = vec![false; n];
                    for r in &p[3..] {
                        let img = round_pt(alpha.apply(&r.0, &r.1), bits);
                        let matches: Vec<usize> = (0..n)
                            .filter(|&t| bracket(&img, &q[t]).contains_zero())
                            .collect();
                        match matches.as_slice() {
                            [] => {
                                excluded = true;
                                break;
                            }
                            [t] if !hit[*t] => hit[*t] = true,
                            _ => unique = false,
                        }
                    }
                    if excluded {
                        continue;
                    }
                    survivors += 1;
                    let consistent = unique && found.is_none() && {
                        let lift = |f: &BinaryForm| f.map(|c| ComplexInterval::real(c.clone()));
                        numeric_proportional(&substitute_rounded(&lift(h2), &alpha, bits), &lift(h))
                    };
                    if unique && consistent && found.is_none() {
                        found = Some(alpha);
                    }
                }
            }
        }
        if survivors == 0 {
            let mut v = EquivalenceVerdict::new(
                VerdictResult::Inequivalent,
                Some(CertificateKind::CertifiedNumeric),
            );
            v.exhaustive_search = true;
            v.precision_bits = Some(bits);
            return Ok(v);
        }
        if let Some(alpha) = found {
            let mut v = EquivalenceVerdict::new(
                VerdictResult::Equivalent,
                Some(CertificateKind::CertifiedNumeric),
            );
            v.witness = Some(MobiusWitness::Numeric(alpha));
            v.exhaustive_search = true;
            v.precision_bits = Some(bits);
            return Ok(v);
        }
        if bits >= cap {
            let mut v = EquivalenceVerdict::new(VerdictResult::UndecidedAtPrecision, None);
            v.precision_bits = Some(bits);
            return Ok(v);
        }
        bits = (bits * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::DEFAULT_PRECISION_CAP;
    use crate::scalar::{int, rat};

    fn f(c: &[i64]) -> BinaryForm {
        Form::from_integers(c)
    }

    fn pts(v: &[(i64, i64)]) -> Vec<Pt<Rational>> {
        v.iter().map(|&(p, q)| (int(p), int(q))).collect()
    }

    #[test]
    fn j_values_of_reference_sets() {
        let a = pts(&[(0, 1), (1, 1), (2, 1), (1, 0)]);
        assert_eq!(j_invariants(&a), vec![int(1728)]);
        let b = pts(&[(0, 1), (1, 1), (3, 1), (1, 0)]);
        assert_eq!(j_invariants(&b), vec![rat(21952, 9)]);
    }

    #[test]
    fn separated_by_fingerprint() {
        // t0 t1 (t0 - t1)(t0 - 2 t1) vs t0 t1 (t0 - t1)(t0 - 3 t1)
        let h = f(&[0, 1, -3, 2, 0]);
        let h2 = f(&[0, 1, -4, 3, 0]);
        let v = find_mobius_witness(&h, &h2, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Inequivalent);
        assert_eq!(
            v.certificate_kind,
            Some(CertificateKind::FingerprintSeparation)
        );
        assert!(v.exhaustive_search);
    }

    #[test]
    fn recovers_constructed_witness() {
        let h = f(&[0, 1, -3, 2, 0]);
        let alpha = Mobius::new(int(1), int(1), int(0), int(1));
        let h2 = h.substitute_mobius(&alpha).unwrap();
        let v = find_mobius_witness(&h, &h2, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Equivalent);
        let Some(MobiusWitness::Rational(w)) = &v.witness else {
            panic!()
        };
        assert!(verify_witness_exact(&h, &h2, w).unwrap().is_some());
    }

    #[test]
    fn two_point_sets() {
        let v =
            find_mobius_witness(&f(&[0, 1, 0]), &f(&[1, -1, 0]), DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Equivalent);
        // Roots in Q(i) and Q(sqrt 2).
        let v =
            find_mobius_witness(&f(&[1, 0, 1]), &f(&[1, 0, -2]), DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Equivalent);
        assert_eq!(v.certificate_kind, Some(CertificateKind::ExactWitness));
        let w = v.witness.unwrap();
        let check = verify_witness(&f(&[1, 0, 1]), &f(&[1, 0, -2]), &w).unwrap();
        assert_eq!(check.holds, Some(true));
    }

    #[test]
    fn conjugate_pairs_in_one_field() {
        // (t0^2 + t1^2)(t0^2 + 4 t1^2) and its image under t0 -> t0 + t1.
        let h = f(&[1, 0, 1]).mul(&f(&[1, 0, 4]));
        let alpha = Mobius::new(int(1), int(1), int(0), int(1));
        let h2 = h.substitute_mobius(&alpha).unwrap();
        let v = find_mobius_witness(&h, &h2, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Equivalent);
        assert_eq!(v.certificate_kind, Some(CertificateKind::ExactWitness));
    }

    #[test]
    fn cubic_roots_go_numeric() {
        // (t0^3 - 2 t1^3) t1 against its translate, and against t0 t1 (t0^2 - t1^2).
        let h = f(&[1, 0, 0, -2]).mul(&f(&[0, 1]));
        let alpha = Mobius::new(int(1), int(2), int(0), int(1));
        let h2 = h.substitute_mobius(&alpha).unwrap();
        let v = find_mobius_witness(&h, &h2, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Equivalent);
        assert_eq!(v.certificate_kind, Some(CertificateKind::CertifiedNumeric));
        let other = f(&[0, 1, 0, -1, 0]);
        let v = find_mobius_witness(&h, &other, DEFAULT_PRECISION_CAP).unwrap();
        assert_eq!(v.result, VerdictResult::Inequivalent);
    }

    #[test]
    fn identity_and_swap_witnesses() {
        let h = f(&[0, 1, 0]);
        let id = MobiusWitness::Rational(Mobius::identity());
        let sw = MobiusWitness::Rational(Mobius::swap());
        assert_eq!(
            verify_witness(&h, &h, &id).unwrap().lambda.as_deref(),
            Some("1")
        );
        assert_eq!(
            verify_witness(&h, &h, &sw).unwrap().lambda.as_deref(),
            Some("1")
        );
        let sing = MobiusWitness::Rational(Mobius::new(int(1), int(1), int(1), int(1)));
        assert!(matches!(
            verify_witness(&h, &h, &sing),
            Err(Error::SingularMatrix)
        ));
    }
}
