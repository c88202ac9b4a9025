//! Blowup resolution of the local models `Q(x) + t^k gamma(t) = 0` of singular
//! fibers, weighted-blowup towers, and the extraction classifier.
//!
//! Variables of a local model are `x0, ..., x_{n-1}, t` (indices `0..=n`) and
//! `Q = x1^2 - x0 x2 + x3^2 + ... + x_{n-1}^2`. Every blowup is carried out
//! symbolically in one affine chart while the composite map, its Jacobian
//! determinant and the multiplier `F_orig o pi = mult * F_current` are tracked
//! and re-verified. Orders of vanishing along exceptional divisors are read
//! off from formal arcs through random points of the divisor.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binform::PointP1;
use crate::error::{Error, Result};
use crate::fibration::{SingularPoint, UmemuraFibration};
use crate::mpoly::{groebner, is_unit_ideal, MPoly};
use crate::poly::Poly;
use crate::quadform::rank;
use crate::scalar::Rational;

type P = MPoly<Rational>;

const ARC_SEED: u64 = 0x5eed_a7c5;
const ARC_POINTS: usize = 3;
const ARC_MAX_PRECISION: usize = 256;

/// `Q(x) + t^k gamma(t) = 0` in affine `(n+1)`-space.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalModel {
    n: usize,
    k: u32,
    gamma: Poly<Rational>,
}

impl LocalModel {
    pub fn new(n: usize, k: u32, gamma: Poly<Rational>) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionTooSmall { n });
        }
        if gamma.coeff(0).is_zero() {
            return Err(Error::Internal("gamma(0) must be nonzero".into()));
        }
        Ok(LocalModel { n, k, gamma })
    }

    /// The model with `gamma = 1`.
    pub fn simple(n: usize, k: u32) -> Result<Self> {
        Self::new(n, k, Poly::one())
    }

    /// Local model at a singular point of a fibration.
    pub fn at(x: &UmemuraFibration, p: &SingularPoint) -> Result<Self> {
        Self::new(x.n(), p.multiplicity, p.gamma.clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma(&self) -> &Poly<Rational> {
        &self.gamma
    }

    fn with_k(&self, k: u32) -> Self {
        LocalModel { k, ..self.clone() }
    }

    pub fn equation(&self) -> P {
        let nv = self.n + 1;
        let tk = P::term(unit_exps(nv, self.n, self.k), Rational::one());
        &quadric(self.n, nv) + &(&tk * &P::from_univariate(nv, self.n, &self.gamma))
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..self.n).map(|i| format!("x{i}")).collect();
        v.push("t".into());
        v
    }

    /// Jacobian criterion at the origin.
    pub fn is_singular_at_origin(&self) -> bool {
        let f = self.equation();
        let zero = vec![Rational::zero(); self.n + 1];
        f.eval(&zero).is_zero() && (0..=self.n).all(|i| f.derivative(i).eval(&zero).is_zero())
    }
}

/// `x1^2 - x0 x2 + x3^2 + ... + x_{n-1}^2` in `nv` variables.
fn quadric(n: usize, nv: usize) -> P {
    let mut q = &P::var(nv, 1) * &P::var(nv, 1) - &P::var(nv, 0) * &P::var(nv, 2);
    for j in 3..n {
        q = &q + &(&P::var(nv, j) * &P::var(nv, j));
    }
    q
}

fn unit_exps(nv: usize, i: usize, k: u32) -> Vec<u32> {
    let mut e = vec![0; nv];
    e[i] = k;
    e
}

fn var_pow(nv: usize, i: usize, k: u32) -> P {
    P::term(unit_exps(nv, i, k), Rational::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExceptionalType {
    SmoothQuadric,
    QuadricCone,
    ProjectiveSpace,
}

impl ExceptionalType {
    /// The type forced by the local exponent at the step.
    pub fn for_local_k(k: u32) -> Self {
        match k {
            1 => ExceptionalType::ProjectiveSpace,
            2 => ExceptionalType::SmoothQuadric,
            _ => ExceptionalType::QuadricCone,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlowupStep {
    pub index: usize,
    #[serde(rename = "type")]
    pub exceptional_type: ExceptionalType,
    /// Coefficient of `E_i` in `K_{X_i} - f^* K`.
    pub discrepancy: i64,
    /// Coefficient of `E_i` in the pullback of the fiber.
    pub fiber_multiplicity: i64,
    #[serde(rename = "localK")]
    pub new_local_k: u32,
    /// The step was the last one (blowup of a smooth point, `k = 1`).
    pub terminal: bool,
    pub strict_transform: String,
    /// Charts of the blowup checked for singular points on the exceptional divisor.
    pub charts_verified: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KPairing {
    pub curve: String,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessCertificate {
    pub passed: bool,
    /// Generators of the ideals shown to be the unit ideal.
    pub generators: Vec<Vec<String>>,
}

/// Closed-form shortcut values, kept side by side with the computed ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrintedComparison {
    /// `E_m` read as projective space when `m` is odd, a quadric otherwise.
    pub final_type_by_m_parity: ExceptionalType,
    pub final_type_by_k: ExceptionalType,
    /// `r = 1` if `m` even, `2` otherwise.
    pub printed_final_fiber_multiplicity: i64,
    /// `(m-1)(n-2) + (n-2 or n-1)`.
    pub printed_final_discrepancy: i64,
    pub printed_k_dot_e0: i64,
    pub printed_k_dot_inner: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolutionLedger {
    pub point: Option<String>,
    pub n: usize,
    pub k: u32,
    pub m: usize,
    pub steps: Vec<BlowupStep>,
    pub k_pairing_table: Vec<KPairing>,
    pub cone_generators: Vec<String>,
    pub smoothness_certificate: SmoothnessCertificate,
    pub printed: PrintedComparison,
}

impl ResolutionLedger {
    pub fn k_pairing(&self, i: usize) -> i64 {
        self.k_pairing_table[i].value
    }

    pub fn final_type(&self) -> ExceptionalType {
        self.steps
            .last()
            .expect("at least one step")
            .exceptional_type
    }

    pub fn with_point(mut self, p: &PointP1) -> Self {
        self.point = Some(p.key());
        self
    }
}

/// Composite of the blowups performed so far, seen from the current chart.
struct Chart {
    original: P,
    images: Vec<P>,
    jac: P,
    mult: P,
    current: P,
}

impl Chart {
    fn start(model: &LocalModel) -> Self {
        let nv = model.n + 1;
        let f = model.equation();
        Chart {
            original: f.clone(),
            images: (0..nv).map(|i| P::var(nv, i)).collect(),
            jac: P::one(nv),
            mult: P::one(nv),
            current: f,
        }
    }

    /// Pull everything back along `sigma`; `factor` is the power of the
    /// exceptional equation split off, `next` the strict transform.
    fn advance(&mut self, sigma: &[P], factor: &P, next: P) -> Result<()> {
        if self.current.substitute(sigma) != (factor * &next) {
            return Err(Error::Internal("strict transform identity failed".into()));
        }
        self.images = self.images.iter().map(|p| p.substitute(sigma)).collect();
        self.jac = &self.jac.substitute(sigma) * &jacobian_det(sigma);
        self.mult = &self.mult.substitute(sigma) * factor;
        self.current = next;
        if self.original.substitute(&self.images) != &self.mult * &self.current {
            return Err(Error::Internal("composite pullback identity failed".into()));
        }
        Ok(())
    }
}

fn jacobian_det(sigma: &[P]) -> P {
    let m: Vec<Vec<P>> = sigma
        .iter()
        .map(|p| (0..sigma.len()).map(|j| p.derivative(j)).collect())
        .collect();
    laplace(&m)
}

fn laplace(m: &[Vec<P>]) -> P {
    let size = m.len();
    if size == 1 {
        return m[0][0].clone();
    }
    let nv = m[0][0].nvars();
    let mut acc = P::zero(nv);
    for j in 0..size {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<P>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &laplace(&minor);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// Type of the exceptional divisor of the blowup of the origin, read off the
/// tangent cone of `f`.
fn tangent_cone_type(f: &P) -> Result<ExceptionalType> {
    let d = f.order_at_origin().unwrap_or(0);
    match d {
        1 => Ok(ExceptionalType::ProjectiveSpace),
        2 => {
            let cone = f.homogeneous_part(2);
            let nv = f.nvars();
            let mut gram = vec![vec![Rational::zero(); nv]; nv];
            for (e, c) in cone.terms() {
                let idx: Vec<usize> = (0..nv)
                    .flat_map(|i| std::iter::repeat_n(i, e[i] as usize))
                    .collect();
                if idx[0] == idx[1] {
                    gram[idx[0]][idx[0]] = c.clone();
                } else {
                    let half = c.clone() / Rational::from_integer(2.into());
                    gram[idx[0]][idx[1]] = half.clone();
                    gram[idx[1]][idx[0]] = half;
                }
            }
            match rank(&gram) {
                r if r == nv => Ok(ExceptionalType::SmoothQuadric),
                r if r == nv - 1 => Ok(ExceptionalType::QuadricCone),
                r => Err(Error::Internal(format!("unexpected tangent cone rank {r}"))),
            }
        }
        d => Err(Error::Internal(format!(
            "unexpected multiplicity {d} at the center"
        ))),
    }
}

/// Substitution `x_i = u, x_j = u y_j, t = u s` (chart `i` of the blowup of
/// the origin); the chart variable `u` keeps index `i`.
fn point_blowup_chart(nv: usize, i: usize) -> Vec<P> {
    (0..nv)
        .map(|j| {
            if j == i {
                P::var(nv, i)
            } else {
                &P::var(nv, i) * &P::var(nv, j)
            }
        })
        .collect()
}

/// Whether the strict transform in `chart` has no singular point on `{u = 0}`.
fn chart_smooth_on_exceptional(f: &P, chart: &[P], u: usize, power: u32) -> Result<(bool, Vec<P>)> {
    let strict = f
        .substitute(chart)
        .div_var_power(u, power)
        .ok_or_else(|| Error::Internal("exceptional multiplicity too low".into()))?;
    let nv = f.nvars();
    let mut gens = vec![strict.clone()];
    gens.extend((0..nv).map(|j| strict.derivative(j)));
    gens.push(P::var(nv, u));
    Ok((is_unit_ideal(&gens), gens))
}

/// Singular locus of `f` over `{t = 0}`: `Some(true)` if it is the origin,
/// `Some(false)` if empty, `None` otherwise.
fn singular_locus_over_origin(f: &P, t: usize) -> Option<bool> {
    let nv = f.nvars();
    let mut gens = vec![f.clone()];
    gens.extend((0..nv).map(|j| f.derivative(j)));
    gens.push(P::var(nv, t));
    let gb = groebner(&gens);
    if gb.iter().any(|g| g.is_constant() && !g.is_zero()) {
        return Some(false);
    }
    (0..nv)
        .all(|j| P::var(nv, j).reduce(&gb).is_zero())
        .then_some(true)
}

// ---------------------------------------------------------------------------
// Formal arcs

fn series_mul(a: &[Rational], b: &[Rational], prec: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inv(a: &[Rational], prec: usize) -> Vec<Rational> {
    let a0 = a[0].recip();
    let mut out = vec![Rational::zero(); prec];
    out[0] = a0.clone();
    for i in 1..prec {
        let mut s = Rational::zero();
        for j in 1..=i.min(a.len() - 1) {
            s += &a[j] * &out[i - j];
        }
        out[i] = -s * &a0;
    }
    out
}

fn series_eval(f: &P, vals: &[Vec<Rational>], prec: usize) -> Vec<Rational> {
    let mut powers: Vec<Vec<Vec<Rational>>> = vals
        .iter()
        .map(|v| {
            let mut one = vec![Rational::zero(); prec];
            one[0] = Rational::one();
            vec![one, v.clone()]
        })
        .collect();
    let mut out = vec![Rational::zero(); prec];
    for (e, c) in f.terms() {
        let mut t = vec![Rational::zero(); prec];
        t[0] = c.clone();
        for (i, &k) in e.iter().enumerate() {
            let k = k as usize;
            while powers[i].len() <= k {
                let next = series_mul(powers[i].last().unwrap(), &vals[i], prec);
                powers[i].push(next);
            }
            if k > 0 {
                t = series_mul(&t, &powers[i][k], prec);
            }
        }
        for (o, x) in out.iter_mut().zip(t) {
            *o += x;
        }
    }
    out
}

fn series_order(s: &[Rational]) -> Option<usize> {
    s.iter().position(|c| !c.is_zero())
}

/// Arcs `eps -> (..., d = eps, ..., w = w(eps), ...)` on `{f = 0}` through
/// random points of the divisor `{d = 0}`, with `w` solved by Newton.
struct Arcs {
    f: P,
    d: usize,
    w: usize,
    bases: Vec<Vec<Rational>>,
}

impl Arcs {
    fn new(f: &P, d: usize, w: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(ARC_SEED);
        let nv = f.nvars();
        let mut bases = Vec::new();
        for _ in 0..ARC_POINTS {
            let mut base: Vec<Rational> = (0..nv)
                .map(|_| {
                    let mut num = 0i64;
                    while num == 0 {
                        num = rng.gen_range(-9..=9);
                    }
                    Rational::new(num.into(), rng.gen_range(1i64..=4).into())
                })
                .collect();
            base[d] = Rational::zero();
            // Restrict to the line through the base point in the w direction.
            let line: Vec<MPoly<Rational>> = (0..nv)
                .map(|j| {
                    if j == w {
                        MPoly::var(1, 0)
                    } else {
                        MPoly::constant(1, base[j].clone())
                    }
                })
                .collect();
            let r = f.substitute(&line);
            if r.degree_in(0) != Some(1) {
                return Err(Error::Internal("arc base equation is not linear".into()));
            }
            base[w] = -r.coeff(&[0]) / r.coeff(&[1]);
            bases.push(base);
        }
        Ok(Arcs {
            f: f.clone(),
            d,
            w,
            bases,
        })
    }

    fn lift(&self, base: &[Rational], prec: usize) -> Result<Vec<Vec<Rational>>> {
        let mut vals: Vec<Vec<Rational>> = base
            .iter()
            .map(|c| {
                let mut s = vec![Rational::zero(); prec];
                s[0] = c.clone();
                s
            })
            .collect();
        if prec > 1 {
            vals[self.d][1] = Rational::one();
        }
        let df = self.f.derivative(self.w);
        for _ in 0..64 {
            let r = series_eval(&self.f, &vals, prec);
            if series_order(&r).is_none() {
                return Ok(vals);
            }
            let dr = series_eval(&df, &vals, prec);
            let step = series_mul(&r, &series_inv(&dr, prec), prec);
            for (x, s) in vals[self.w].iter_mut().zip(step) {
                *x -= s;
            }
        }
        Err(Error::Internal("Newton lifting did not converge".into()))
    }

    /// Order of vanishing of `h` along the divisor.
    fn order(&self, h: &P) -> Result<i64> {
        let v = h
            .var_valuation(self.d)
            .ok_or_else(|| Error::Internal("order of zero".into()))?;
        let rest = h.div_var_power(self.d, v).expect("valuation divides");
        let mut prec = 16;
        loop {
            let mut best: Option<usize> = None;
            for base in &self.bases {
                let vals = self.lift(base, prec)?;
                if let Some(o) = series_order(&series_eval(&rest, &vals, prec)) {
                    best = Some(best.map_or(o, |b| b.min(o)));
                }
            }
            if let Some(o) = best {
                return Ok(v as i64 + o as i64);
            }
            if prec >= ARC_MAX_PRECISION {
                return Err(Error::Internal(
                    "function vanishes identically on the divisor".into(),
                ));
            }
            prec *= 2;
        }
    }
}

// ---------------------------------------------------------------------------
// Steps

struct StepOutcome {
    step: BlowupStep,
    next: Option<LocalModel>,
    certificate: Vec<Vec<String>>,
}

fn names_for(model: &LocalModel) -> Vec<String> {
    model.variable_names()
}

fn render(p: &P, names: &[String]) -> String {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    p.to_string_with(&refs)
}

/// One blowup of the origin of `model`, performed on `chart`.
fn step(chart: &mut Chart, model: &LocalModel, index: usize) -> Result<StepOutcome> {
    let n = model.n;
    let nv = n + 1;
    let k = model.k;
    if k == 0 {
        return Err(Error::AlreadySmooth);
    }
    if model.is_singular_at_origin() != (k >= 2) {
        return Err(Error::Internal(
            "Jacobian criterion disagrees with the k threshold".into(),
        ));
    }
    let f = model.equation();
    let exceptional_type = tangent_cone_type(&f)?;
    if exceptional_type != ExceptionalType::for_local_k(k) {
        return Err(Error::Internal(
            "tangent cone disagrees with the k rule".into(),
        ));
    }
    let mut certificate = Vec::new();
    if k >= 2 {
        // Charts x_i = u: no singular points on the exceptional divisor.
        for i in 0..n {
            let (ok, _) = chart_smooth_on_exceptional(&f, &point_blowup_chart(nv, i), i, 2)?;
            if !ok {
                return Err(Error::Internal(format!("singular point in chart x{i}")));
            }
        }
        // Chart t = s, x_j = s y_j: the model with k - 2.
        let sigma: Vec<P> = (0..nv)
            .map(|j| {
                if j == n {
                    P::var(nv, n)
                } else {
                    &P::var(nv, n) * &P::var(nv, j)
                }
            })
            .collect();
        let next = model.with_k(k - 2);
        chart.advance(&sigma, &var_pow(nv, n, 2), next.equation())?;
        let expect = if k - 2 >= 2 { Some(true) } else { Some(false) };
        if singular_locus_over_origin(&chart.current, n) != expect {
            return Err(Error::Internal(
                "singular locus of the strict transform is not as expected".into(),
            ));
        }
        let arcs = Arcs::new(&chart.current, n, 0)?;
        let discrepancy = arcs.order(&chart.jac)? - arcs.order(&chart.mult)?;
        let fiber_multiplicity = arcs.order(&chart.images[n])?;
        if k - 2 <= 1 {
            let mut gens = vec![chart.current.clone()];
            gens.extend((0..nv).map(|j| chart.current.derivative(j)));
            gens.push(P::var(nv, n));
            let names = names_for(model);
            certificate.push(gens.iter().map(|g| render(g, &names)).collect());
        }
        Ok(StepOutcome {
            step: BlowupStep {
                index,
                exceptional_type,
                discrepancy,
                fiber_multiplicity,
                new_local_k: k - 2,
                terminal: false,
                strict_transform: render(&chart.current, &names_for(model)),
                charts_verified: nv,
            },
            next: Some(next),
            certificate,
        })
    } else {
        // Blowup of a smooth point: every chart must be smooth along u = 0.
        for i in 0..nv {
            let (ok, gens) = chart_smooth_on_exceptional(&f, &point_blowup_chart(nv, i), i, 1)?;
            if !ok {
                return Err(Error::Internal(format!(
                    "singular point in chart {i} of the final blowup"
                )));
            }
            if i == 1 {
                certificate.push(gens.iter().map(|g| render(g, &final_names(n))).collect());
            }
        }
        let sigma = point_blowup_chart(nv, 1);
        let next = f
            .substitute(&sigma)
            .div_var_power(1, 1)
            .ok_or_else(|| Error::Internal("final strict transform".into()))?;
        chart.advance(&sigma, &P::var(nv, 1), next)?;
        let arcs = Arcs::new(&chart.current, 1, n)?;
        let discrepancy = arcs.order(&chart.jac)? - arcs.order(&chart.mult)?;
        let fiber_multiplicity = arcs.order(&chart.images[n])?;
        Ok(StepOutcome {
            step: BlowupStep {
                index,
                exceptional_type,
                discrepancy,
                fiber_multiplicity,
                new_local_k: 0,
                terminal: true,
                strict_transform: render(&chart.current, &final_names(n)),
                charts_verified: nv,
            },
            next: None,
            certificate,
        })
    }
}

/// Chart variables of the final blowup: `x1 = u`, `x_j = u y_j`, `t = u s`.
fn final_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..n)
        .map(|i| if i == 1 { "u".into() } else { format!("y{i}") })
        .collect();
    v.push("s".into());
    v
}

/// Blow up the origin once. The returned model is `None` after the final
/// blowup of a smooth point (`k = 1`).
pub fn blowup_step(model: &LocalModel) -> Result<(Option<LocalModel>, BlowupStep)> {
    let mut chart = Chart::start(model);
    let out = step(&mut chart, model, 1)?;
    Ok((out.next, out.step))
}

/// Blow up until the total space is smooth and the fiber is simple normal
/// crossing: `ceil(k/2)` steps.
pub fn resolve_point(model: &LocalModel) -> Result<ResolutionLedger> {
    let n = model.n;
    let k = model.k;
    if k == 0 {
        return Err(Error::AlreadySmooth);
    }
    let mut chart = Chart::start(model);
    let mut steps = Vec::new();
    let mut certificate = Vec::new();
    let mut current = Some(model.clone());
    while let Some(m) = current.take() {
        if m.k == 0 {
            break;
        }
        let out = step(&mut chart, &m, steps.len() + 1)?;
        steps.push(out.step);
        certificate.extend(out.certificate);
        current = out.next;
    }
    let m = steps.len();
    if m != k.div_ceil(2) as usize {
        return Err(Error::Internal(format!("{m} blowups for k = {k}")));
    }

    // Index 0 is the strict transform of the fiber.
    let a: Vec<i64> = std::iter::once(0)
        .chain(steps.iter().map(|s| s.discrepancy))
        .collect();
    let r: Vec<i64> = std::iter::once(1)
        .chain(steps.iter().map(|s| s.fiber_multiplicity))
        .collect();
    let mut table = vec![KPairing {
        curve: "e0".into(),
        value: -(n as i64 - 1) + a[1],
    }];
    for i in 1..m {
        let self_int = Rational::new((-(r[i - 1] + r[i + 1])).into(), r[i].into());
        let v = Rational::from_integer(a[i - 1].into())
            + self_int * Rational::from_integer(a[i].into())
            + Rational::from_integer(a[i + 1].into());
        if !v.is_integer() {
            return Err(Error::Internal("non-integral K pairing".into()));
        }
        table.push(KPairing {
            curve: format!("e{i}"),
            value: v.to_integer().to_i64().expect("small"),
        });
    }
    let last = steps[m - 1].exceptional_type;
    let meet = if last == ExceptionalType::ProjectiveSpace {
        2
    } else {
        1
    };
    if r[m - 1] * meet != r[m] {
        return Err(Error::Internal(
            "fiber pullback is not numerically trivial on e_m".into(),
        ));
    }
    table.push(KPairing {
        curve: format!("e{m}"),
        value: a[m - 1] * meet - a[m],
    });

    let nn = n as i64;
    let mm = m as i64;
    let printed = PrintedComparison {
        final_type_by_m_parity: if m % 2 == 1 {
            ExceptionalType::ProjectiveSpace
        } else {
            ExceptionalType::SmoothQuadric
        },
        final_type_by_k: ExceptionalType::for_local_k(if k.is_multiple_of(2) { 2 } else { 1 }),
        printed_final_fiber_multiplicity: if m % 2 == 0 { 1 } else { 2 },
        printed_final_discrepancy: (mm - 1) * (nn - 2)
            + if k.is_multiple_of(2) { nn - 2 } else { nn - 1 },
        printed_k_dot_e0: -1,
        printed_k_dot_inner: 0,
    };
    Ok(ResolutionLedger {
        point: None,
        n,
        k,
        m,
        steps,
        k_pairing_table: table,
        cone_generators: (1..=m).map(|i| format!("e{i}")).collect(),
        smoothness_certificate: SmoothnessCertificate {
            passed: !certificate.is_empty(),
            generators: certificate,
        },
        printed,
    })
}

/// Resolution ledgers for every singular point of a fibration.
pub fn resolve_fibration(x: &UmemuraFibration) -> Result<Vec<ResolutionLedger>> {
    x.singular_points()
        .iter()
        .map(|p| Ok(resolve_point(&LocalModel::at(x, p)?)?.with_point(&p.point)))
        .collect()
}

// ---------------------------------------------------------------------------
// Weighted blowup towers

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TowerStep {
    pub index: usize,
    pub center: String,
    /// Images of the chart coordinates of the previous space.
    pub chart_map: Vec<String>,
    /// The composite chart `V_i -> A^{n+1}`.
    pub composite: Vec<String>,
    /// The map from the weighted blowup chart `U` to `V_i`.
    pub induced_map: Vec<String>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TowerLedger {
    pub n: usize,
    pub b: u32,
    pub weighted_chart: Vec<String>,
    pub steps: Vec<TowerStep>,
}

/// Factor the `(1, ..., 1, b)` blowup of the origin of `(u, x1, ..., x_{n-1}, t)`
/// into `b` ordinary blowups: first the origin, then the curves `Gamma_i`
/// where `E_i` meets the strict transform of `{t = 0}`.
pub fn tower_weighted_blowup(n: usize, b: u32) -> Result<TowerLedger> {
    if b == 0 {
        return Err(Error::Internal("weight must be positive".into()));
    }
    let nv = n + 1;
    let names: Vec<String> = std::iter::once("u".to_string())
        .chain((1..n).map(|i| format!("x{i}")))
        .chain(std::iter::once("t".into()))
        .collect();
    let show = |ps: &[P]| ps.iter().map(|p| render(p, &names)).collect::<Vec<_>>();
    let u = P::var(nv, 0);
    let weighted: Vec<P> = (0..nv)
        .map(|j| match j {
            0 => u.clone(),
            j if j == n => &var_pow(nv, 0, b) * &P::var(nv, n),
            j => &u * &P::var(nv, j),
        })
        .collect();
    let mut composite: Vec<P> = (0..nv).map(|i| P::var(nv, i)).collect();
    let mut steps = Vec::new();
    for i in 1..=b as usize {
        let sigma: Vec<P> = (0..nv)
            .map(|j| match j {
                0 => u.clone(),
                j if j == n => &u * &P::var(nv, n),
                j if i == 1 => &u * &P::var(nv, j),
                j => P::var(nv, j),
            })
            .collect();
        // The center is blown up: its ideal pulls back to a principal one.
        let center_ok = if i == 1 {
            (0..nv).all(|j| sigma[j].div_var_power(0, 1).is_some())
        } else {
            sigma[n].div_var_power(0, 1).is_some()
        };
        composite = composite.iter().map(|p| p.substitute(&sigma)).collect();
        let closed_form: Vec<P> = (0..nv)
            .map(|j| match j {
                0 => u.clone(),
                j if j == n => &var_pow(nv, 0, i as u32) * &P::var(nv, n),
                j => &u * &P::var(nv, j),
            })
            .collect();
        // Pullback of t is u^i t: the strict transform of {t = 0} is {t = 0}
        // and meets E_i = {u = 0} in Gamma_i = {u = t = 0}.
        let strict_t = composite[n].div_var_power(0, i as u32);
        let gamma_ok = strict_t.as_ref() == Some(&P::var(nv, n));
        let induced: Vec<P> = (0..nv)
            .map(|j| {
                if j == n {
                    &var_pow(nv, 0, b - i as u32) * &P::var(nv, n)
                } else {
                    P::var(nv, j)
                }
            })
            .collect();
        let through: Vec<P> = composite.iter().map(|p| p.substitute(&induced)).collect();
        let verified = center_ok && gamma_ok && composite == closed_form && through == weighted;
        if !verified {
            return Err(Error::Internal(format!(
                "tower step {i} failed verification"
            )));
        }
        steps.push(TowerStep {
            index: i,
            center: if i == 1 {
                "origin".into()
            } else {
                format!("Gamma_{}", i - 1)
            },
            chart_map: show(&sigma),
            composite: show(&composite),
            induced_map: show(&induced),
            verified,
        });
    }
    Ok(TowerLedger {
        n,
        b,
        weighted_chart: show(&weighted),
        steps,
    })
}

// ---------------------------------------------------------------------------
// Extractions

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionInfo {
    pub weight_b: u32,
    /// Weighted order of the local equation under weights `(1, ..., 1, b)`.
    pub weighted_multiplicity: u32,
    /// `a` in `K_X = f^* K + a E`.
    pub discrepancy: i64,
    /// `-K_X . l0~`, computed from the weighted multiplicity.
    pub second_ray_k_pairing: i64,
    /// The closed formula `min(k, 2) - b`.
    pub printed_k_pairing: i64,
    pub is_link_seed: bool,
    pub relative_cone: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionClassification {
    pub point: String,
    pub k: u32,
    /// Whether the classification is known to be complete (`a >= 2`).
    pub exhaustive: bool,
    pub extractions: Vec<ExtractionInfo>,
}

fn weighted_order(f: &P, weights: &[u32]) -> u32 {
    f.terms()
        .map(|(e, _)| e.iter().zip(weights).map(|(a, w)| a * w).sum::<u32>())
        .min()
        .unwrap_or(0)
}

/// The restriction of the `(1, ..., 1, b)` blowup to the local model.
pub fn extraction_info(model: &LocalModel, b: u32) -> ExtractionInfo {
    let n = model.n;
    let mut weights = vec![1; n + 1];
    weights[n] = b;
    let wm = weighted_order(&model.equation(), &weights);
    // Sum of weights minus one, minus the weighted order of the hypersurface.
    let discrepancy = (n as i64 + b as i64 - 1) - wm as i64;
    // -K . l0 = n - 1 for a line in a fiber, and E . l0~ = 1.
    let pairing = (n as i64 - 1) - discrepancy;
    let k = model.k;
    ExtractionInfo {
        weight_b: b,
        weighted_multiplicity: wm,
        discrepancy,
        second_ray_k_pairing: pairing,
        printed_k_pairing: k.min(2) as i64 - b as i64,
        is_link_seed: pairing > 0,
        relative_cone: vec!["e".into(), "l0~".into()],
    }
}

/// Extremal extractions centered at the vertex over the root `p`, for
/// `b = 1..=b_max`.
pub fn classify_extractions(
    x: &UmemuraFibration,
    p: &PointP1,
    b_max: u32,
) -> Result<ExtractionClassification> {
    let k = x
        .roots()
        .entries
        .iter()
        .find(|(q, _)| q == p)
        .map(|(_, k)| *k)
        .ok_or(Error::NotAVertexPoint)?;
    let gamma = x
        .singular_points()
        .iter()
        .find(|s| &s.point == p)
        .map_or_else(Poly::one, |s| s.gamma.clone());
    let model = LocalModel::new(x.n(), k, gamma)?;
    Ok(ExtractionClassification {
        point: p.key(),
        k,
        exhaustive: x.a() >= 2,
        extractions: (1..=b_max).map(|b| extraction_info(&model, b)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn strict_transform_lowers_k_by_two() {
        let m = LocalModel::simple(3, 5).unwrap();
        let (next, step) = blowup_step(&m).unwrap();
        assert_eq!(next.unwrap().k(), 3);
        assert_eq!(step.exceptional_type, ExceptionalType::QuadricCone);
        assert_eq!(step.discrepancy, 1);
        assert_eq!(step.fiber_multiplicity, 1);
    }

    #[test]
    fn k_two_gives_smooth_quadric() {
        let (next, step) = blowup_step(&LocalModel::simple(4, 2).unwrap()).unwrap();
        assert_eq!(next.unwrap().k(), 0);
        assert_eq!(step.exceptional_type, ExceptionalType::SmoothQuadric);
        assert_eq!(step.discrepancy, 2);
    }

    #[test]
    fn k_one_is_terminal() {
        let m = LocalModel::new(3, 1, Poly::new(vec![int(1), int(1)])).unwrap();
        let (next, step) = blowup_step(&m).unwrap();
        assert!(next.is_none());
        assert!(step.terminal);
        assert_eq!(step.exceptional_type, ExceptionalType::ProjectiveSpace);
        assert_eq!(step.discrepancy, 2);
        assert!(matches!(
            blowup_step(&LocalModel::simple(3, 0).unwrap()),
            Err(Error::AlreadySmooth)
        ));
    }

    #[test]
    fn ledger_even_k() {
        let l = resolve_point(&LocalModel::simple(3, 4).unwrap()).unwrap();
        assert_eq!(l.m, 2);
        let d: Vec<i64> = l.steps.iter().map(|s| s.discrepancy).collect();
        assert_eq!(d, vec![1, 2]);
        assert_eq!(l.final_type(), ExceptionalType::SmoothQuadric);
        assert_eq!(l.k_pairing(0), -1);
        assert_eq!(l.k_pairing(1), 0);
        assert_eq!(l.k_pairing(2), -1);
        assert!(l.smoothness_certificate.passed);
    }

    #[test]
    fn ledger_odd_k() {
        let l = resolve_point(&LocalModel::new(4, 3, Poly::new(vec![int(2), int(-1)])).unwrap())
            .unwrap();
        assert_eq!(l.m, 2);
        assert_eq!(l.final_type(), ExceptionalType::ProjectiveSpace);
        assert_eq!(l.k_pairing(2), -3);
        // The last exceptional divisor sits on the cone vertex: multiplicity 2.
        assert_eq!(l.steps[1].fiber_multiplicity, 2);
        assert_eq!(l.steps[1].discrepancy, 2 * 2 + 3);
        assert_eq!(l.k_pairing(1), 1);
    }

    #[test]
    fn towers() {
        for b in 1..=4 {
            let t = tower_weighted_blowup(3, b).unwrap();
            assert_eq!(t.steps.len(), b as usize);
            assert_eq!(t.steps[0].center, "origin");
        }
        let t = tower_weighted_blowup(3, 3).unwrap();
        assert_eq!(t.steps[2].center, "Gamma_2");
        assert_eq!(t.steps[1].chart_map, vec!["u", "x1", "x2", "u*t"]);
    }

    #[test]
    fn extraction_values() {
        let m4 = LocalModel::simple(3, 4).unwrap();
        let e = extraction_info(&m4, 1);
        assert_eq!((e.second_ray_k_pairing, e.is_link_seed), (1, true));
        assert_eq!(extraction_info(&m4, 2).second_ray_k_pairing, 0);
        let m1 = LocalModel::simple(3, 1).unwrap();
        let e = extraction_info(&m1, 1);
        assert_eq!((e.second_ray_k_pairing, e.is_link_seed), (0, false));
        let e = extraction_info(&m1, 2);
        assert_eq!((e.second_ray_k_pairing, e.printed_k_pairing), (0, -1));
    }
}
