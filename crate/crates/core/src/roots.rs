//! Certified isolation of the complex roots of squarefree rational polynomials.
//!
//! Seeds come from Aberth iteration in `f64`; they are refined by Aberth steps in
//! dyadic complex rationals and certified with Weierstrass inclusion disks
//! (radius `d * |W_i|`): when the disks are pairwise disjoint each holds exactly
//! one root. Precision starts at 64 bits and doubles up to a cap.

use num_complex::{Complex, Complex64};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::interval::{round_dyadic, sqrt_upper, ComplexInterval, Interval};
use crate::poly::Poly;
use crate::scalar::{Rational, Ring};

type CQ = Complex<Rational>;

/// Default precision cap in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("root boxes could not be separated within {cap} bits")]
    PrecisionExhausted { cap: u32 },
}

/// Isolating boxes for the roots of several pairwise coprime squarefree
/// factors, one vector per factor in input order. Boxes are pairwise disjoint
/// across all factors and avoid every point in `exact_points`.
pub fn isolate_all(
    factors: &[Poly<Rational>],
    exact_points: &[Rational],
    cap: u32,
) -> Result<Vec<Vec<ComplexInterval>>, RootError> {
    let mut prec = 64;
    loop {
        let mut all = Vec::with_capacity(factors.len());
        let mut ok = true;
        for f in factors {
            match certify(f, prec) {
                Some(boxes) => all.push(boxes),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && boxes_separated(&all, exact_points) {
            for boxes in &mut all {
                boxes.sort_by(cmp_box);
            }
            return Ok(all);
        }
        if prec >= cap {
            return Err(RootError::PrecisionExhausted { cap });
        }
        prec = (prec * 2).min(cap);
    }
}

/// Isolating boxes for one squarefree polynomial at a fixed working precision,
/// or at increasing precision up to `cap` until all boxes are narrower than
/// `2^-min_bits`.
pub fn isolate_to_width(
    f: &Poly<Rational>,
    min_bits: u32,
    cap: u32,
) -> Result<Vec<ComplexInterval>, RootError> {
    let target = Rational::new(1.into(), num_bigint::BigInt::from(1) << min_bits);
    let mut prec = 64.max(min_bits + 8);
    loop {
        if let Some(mut boxes) = certify(f, prec.min(cap)) {
            if boxes.iter().all(|b| b.width() <= target) {
                boxes.sort_by(cmp_box);
                return Ok(boxes);
            }
        }
        if prec >= cap {
            return Err(RootError::PrecisionExhausted { cap });
        }
        prec = (prec * 2).min(cap);
    }
}

/// Canonical box order: by midpoint real part, then imaginary part.
pub fn cmp_box(a: &ComplexInterval, b: &ComplexInterval) -> std::cmp::Ordering {
    let (ar, ai) = a.mid();
    let (br, bi) = b.mid();
    ar.cmp(&br).then(ai.cmp(&bi))
}

fn boxes_separated(all: &[Vec<ComplexInterval>], exact: &[Rational]) -> bool {
    let flat: Vec<&ComplexInterval> = all.iter().flatten().collect();
    for (i, a) in flat.iter().enumerate() {
        for b in &flat[i + 1..] {
            if a.overlaps(b) {
                return false;
            }
        }
        for q in exact {
            if a.contains_point(q, &Rational::zero()) {
                return false;
            }
        }
    }
    true
}

fn certify(f: &Poly<Rational>, prec: u32) -> Option<Vec<ComplexInterval>> {
    let d = f.degree().expect("nonzero polynomial");
    if d == 0 {
        return Some(Vec::new());
    }
    if d == 1 {
        let r = -f.coeff(0) / f.coeff(1);
        return Some(vec![ComplexInterval::real(r)]);
    }
    let z = refine(f, &seeds(f), prec)?;
    let fc: Poly<CQ> = f.map(|c| CQ::new(c.clone(), Rational::zero()));
    let lc = fc.lead();
    let mut radii = Vec::with_capacity(d);
    for i in 0..d {
        let mut den = lc.clone();
        for j in 0..d {
            if i != j {
                let diff = z[i].clone() - z[j].clone();
                if diff.is_zero() {
                    return None;
                }
                den *= diff;
            }
        }
        let num = fc.eval(&z[i]);
        let w2 = num.norm_sqr() / den.norm_sqr();
        let scale = Rational::from_integer((d as i64).into());
        let r = sqrt_upper(&(w2 * &scale * &scale), prec + 4);
        radii.push(r);
    }
    for i in 0..d {
        for j in i + 1..d {
            let gap = (z[i].clone() - z[j].clone()).norm_sqr();
            let rr = &radii[i] + &radii[j];
            if gap <= &rr * &rr {
                return None;
            }
        }
    }
    Some(
        z.iter()
            .zip(&radii)
            .map(|(c, r)| {
                ComplexInterval::new(Interval::around(&c.re, r), Interval::around(&c.im, r))
            })
            .collect(),
    )
}

/// Floating-point Aberth seeds.
fn seeds(f: &Poly<Rational>) -> Vec<Complex64> {
    let c: Vec<Complex64> = f
        .coeffs()
        .iter()
        .map(|q| Complex64::new(q.to_f64().unwrap_or(0.0), 0.0))
        .collect();
    let d = c.len() - 1;
    let lc = c[d].norm();
    let cauchy = 1.0 + c[..d].iter().map(|x| x.norm() / lc).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(cauchy * 0.9, th)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::zero();
            for j in 0..d {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Aberth iteration in dyadic rationals at `prec` bits.
fn refine(f: &Poly<Rational>, seeds: &[Complex64], prec: u32) -> Option<Vec<CQ>> {
    let d = seeds.len();
    let fc: Poly<CQ> = f.map(|c| CQ::new(c.clone(), Rational::zero()));
    let dfc = fc.derivative();
    let round = |z: CQ| CQ::new(round_dyadic(&z.re, prec), round_dyadic(&z.im, prec));
    let mut z: Vec<CQ> = seeds
        .iter()
        .map(|s| {
            round(CQ::new(
                Rational::from_float(s.re).unwrap_or_else(Rational::zero),
                Rational::from_float(s.im).unwrap_or_else(Rational::zero),
            ))
        })
        .collect();
    let eps = Rational::new(1.into(), num_bigint::BigInt::from(1) << prec);
    let eps2 = &eps * &eps;
    let max_iter = 8 + 2 * (prec / 16) as usize;
    for _ in 0..max_iter {
        let mut settled = true;
        for i in 0..d {
            let p = fc.eval(&z[i]);
            if p.is_zero() {
                continue;
            }
            let dp = dfc.eval(&z[i]);
            if dp.is_zero() {
                return None;
            }
            let ratio = p / dp;
            let mut s = CQ::zero();
            for j in 0..d {
                if j != i {
                    let diff = z[i].clone() - z[j].clone();
                    if diff.is_zero() {
                        return None;
                    }
                    s += CQ::one_over(diff);
                }
            }
            let denom = CQ::new(Rational::from_i64(1), Rational::zero()) - ratio.clone() * s;
            if denom.is_zero() {
                return None;
            }
            let step = ratio / denom;
            if step.norm_sqr() > eps2 {
                settled = false;
            }
            z[i] = round(z[i].clone() - step);
        }
        if settled {
            break;
        }
    }
    Some(z)
}

trait OneOver {
    fn one_over(z: Self) -> Self;
}

impl OneOver for CQ {
    fn one_over(z: CQ) -> CQ {
        let n = z.norm_sqr();
        CQ::new(&z.re / &n, -(&z.im / &n))
    }
}

/// Whether a box encloses a root of `f`: exact sign change is not available for
/// complex boxes, so this checks that the interval evaluation contains zero.
pub fn box_may_contain_root(f: &Poly<Rational>, b: &ComplexInterval) -> bool {
    f.map(|c| ComplexInterval::real(c.clone()))
        .eval(b)
        .contains_zero()
}
