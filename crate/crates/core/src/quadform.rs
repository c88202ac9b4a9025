//! Normal form of an isotropic quadratic form over a field, typically `Q(t)`.
//!
//! Convention: the Gram matrix `M` satisfies `q(x) = x^T M x`, so off-diagonal
//! entries are half the cross coefficients. The target block `x1^2 - x0 x2`
//! therefore has `N[1][1] = 1` and `N[0][2] = N[2][0] = -1/2`.

use crate::error::{Error, Result};
use crate::ratfunc::{RationalFunction, RationalFunctionJson, SquareClass};
use crate::scalar::{Field, Rational};

/// Square matrix stored row-major.
pub type Matrix<S> = Vec<Vec<S>>;

pub fn transpose<S: Clone>(a: &Matrix<S>) -> Matrix<S> {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul<S: Field>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// Determinant by Gaussian elimination.
pub fn determinant<S: Field>(a: &Matrix<S>) -> S {
    let n = a.len();
    let mut m = a.clone();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det = det * piv.clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / piv.clone();
            for k in c..n {
                let v = m[c][k].clone() * f.clone();
                m[r][k] = m[r][k].clone() - v;
            }
        }
    }
    det
}

/// Symmetric Gram matrix of a quadratic form.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<S> {
    entries: Matrix<S>,
}

impl<S: Field> GramMatrix<S> {
    /// Panics unless `entries` is square and symmetric.
    pub fn new(entries: Matrix<S>) -> Self {
        let n = entries.len();
        assert!(
            entries.iter().all(|r| r.len() == n),
            "matrix must be square"
        );
        for i in 0..n {
            for j in 0..i {
                assert!(entries[i][j] == entries[j][i], "matrix must be symmetric");
            }
        }
        GramMatrix { entries }
    }

    /// Gram matrix of `x1^2 - x0 x2 + sum mu_i x_i^2` (`mus` start at `x3`).
    pub fn normal_form(mus: &[S]) -> Self {
        let size = mus.len() + 3;
        let mut e = vec![vec![S::zero(); size]; size];
        let half = S::from_rational(&Rational::new((-1).into(), 2.into()));
        e[1][1] = S::one();
        e[0][2] = half.clone();
        e[2][0] = half;
        for (i, mu) in mus.iter().enumerate() {
            e[i + 3][i + 3] = mu.clone();
        }
        GramMatrix { entries: e }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn determinant(&self) -> S {
        determinant(&self.entries)
    }

    pub fn bilinear(&self, u: &[S], v: &[S]) -> S {
        let mut acc = S::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc = acc + ui.clone() * self.entries[i][j].clone() * vj.clone();
            }
        }
        acc
    }

    pub fn value(&self, v: &[S]) -> S {
        self.bilinear(v, v)
    }

    /// `T^T M T`.
    pub fn congruent(&self, t: &Matrix<S>) -> GramMatrix<S> {
        GramMatrix {
            entries: mat_mul(&transpose(t), &mat_mul(&self.entries, t)),
        }
    }

    pub fn scaled(&self, c: &S) -> GramMatrix<S> {
        GramMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| x.clone() * c.clone()).collect())
                .collect(),
        }
    }
}

impl GramMatrix<RationalFunction> {
    pub fn to_json(&self) -> Vec<Vec<RationalFunctionJson>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(RationalFunction::to_json).collect())
            .collect()
    }

    pub fn from_json(rows: &[Vec<RationalFunctionJson>]) -> Option<Self> {
        let entries: Matrix<RationalFunction> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(RationalFunction::from_json)
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<_>>()?;
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return None;
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return None;
                }
            }
        }
        Some(GramMatrix { entries })
    }
}

/// Result of [`normalize_quadric`]: `T^T M T = scalar * N`.
///
/// `scalar` is 1 whenever the orthogonal complement of the hyperbolic plane
/// through the point represents a square; otherwise it is the (square-class
/// reduced) value taken on the `x1` axis and the remaining `mus` are divided
/// by it.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadricNormalForm<S> {
    pub transform: Matrix<S>,
    pub normal: GramMatrix<S>,
    pub scalar: S,
    /// Coefficients of `x3^2, ..., xn^2`, reduced modulo squares.
    pub mus: Vec<S>,
    /// `det N / det M` is a square.
    pub determinant_class_preserved: bool,
}

/// Status of the extra condition on the `mu_i` (no square combination); no
/// decision procedure is attempted.
pub const ANISOTROPY_CONDITION: &str = "undecided";

/// Bring `M` into the form `x1^2 - x0 x2 + sum mu_i x_i^2` by a change of
/// basis whose first column is `p`.
pub fn normalize_quadric<S: SquareClass>(
    m: &GramMatrix<S>,
    p: &[S],
) -> Result<QuadricNormalForm<S>> {
    let size = m.size();
    if size < 4 {
        return Err(Error::DimensionTooSmall {
            n: size.saturating_sub(1),
        });
    }
    if p.len() != size {
        return Err(Error::DimensionMismatch {
            left: size,
            right: p.len(),
        });
    }
    if m.determinant().is_zero() {
        return Err(Error::DegenerateForm);
    }
    if p.iter().all(|x| x.is_zero()) || !m.value(p).is_zero() {
        return Err(Error::PointNotOnQuadric);
    }
    let unit = |i: usize| -> Vec<S> {
        (0..size)
            .map(|j| if i == j { S::one() } else { S::zero() })
            .collect()
    };
    let axpy = |a: &S, x: &[S], y: &[S]| -> Vec<S> {
        x.iter()
            .zip(y)
            .map(|(xi, yi)| a.clone() * xi.clone() + yi.clone())
            .collect()
    };
    let neg_half = S::from_rational(&Rational::new((-1).into(), 2.into()));
    let two = S::from_i64(2);

    // Hyperbolic plane: f0 = p, f2 isotropic with B(f0, f2) = -1/2.
    let f0 = p.to_vec();
    let j = (0..size)
        .find(|&j| !m.bilinear(&f0, &unit(j)).is_zero())
        .ok_or(Error::DegenerateForm)?;
    let w: Vec<S> = {
        let b = m.bilinear(&f0, &unit(j));
        let s = neg_half.clone() / b;
        unit(j).into_iter().map(|x| x * s.clone()).collect()
    };
    let f2 = axpy(&m.value(&w), &f0, &w);

    // Orthogonal complement of the plane, spanned by projected unit vectors.
    let project = |v: &[S]| -> Vec<S> {
        let a = two.clone() * m.bilinear(v, &f2);
        let b = two.clone() * m.bilinear(v, &f0);
        axpy(&b, &f2, &axpy(&a, &f0, v))
    };
    let mut basis: Vec<Vec<S>> = Vec::new();
    for i in 0..size {
        if basis.len() == size - 2 {
            break;
        }
        let v = project(&unit(i));
        let mut cand = basis.clone();
        cand.push(v.clone());
        if rank(&cand) == cand.len() {
            basis.push(v);
        }
    }
    if basis.len() != size - 2 {
        return Err(Error::Internal("complement has wrong dimension".into()));
    }

    let (diag_vecs, diag) = diagonalize(m, basis)?;

    // Pick the x1 axis: first square value if any, else the first vector.
    let pick = diag.iter().position(|d| d.is_square()).unwrap_or(0);
    let (c_class, c_root) = diag[pick].square_class();
    let (scalar, f1) = if c_class == S::one() {
        (S::one(), scale(&diag_vecs[pick], &c_root.inv()))
    } else {
        (c_class, scale(&diag_vecs[pick], &c_root.inv()))
    };

    let mut columns = vec![f0, f1, scale(&f2, &scalar)];
    let mut mus = Vec::with_capacity(size - 3);
    for (i, (v, d)) in diag_vecs.iter().zip(&diag).enumerate() {
        if i == pick {
            continue;
        }
        let (mu, r) = (d.clone() / scalar.clone()).square_class();
        columns.push(scale(v, &r.inv()));
        mus.push(mu);
    }
    let t: Matrix<S> = (0..size)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let normal = GramMatrix::normal_form(&mus);
    if m.congruent(&t) != normal.scaled(&scalar) {
        return Err(Error::Internal("congruence identity failed".into()));
    }
    let ratio = normal.determinant() / m.determinant();
    Ok(QuadricNormalForm {
        transform: t,
        normal,
        scalar,
        mus,
        determinant_class_preserved: ratio.is_square(),
    })
}

fn scale<S: Field>(v: &[S], c: &S) -> Vec<S> {
    v.iter().map(|x| x.clone() * c.clone()).collect()
}

pub(crate) fn rank<S: Field>(rows: &[Vec<S>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / m[r][c].clone();
            for k in c..cols {
                let v = m[r][k].clone() * f.clone();
                m[i][k] = m[i][k].clone() - v;
            }
        }
        r += 1;
    }
    r
}

/// Symmetric elimination on the restriction of `m` to `basis`; returns an
/// orthogonal basis and the values of the form on it.
fn diagonalize<S: Field>(
    m: &GramMatrix<S>,
    mut basis: Vec<Vec<S>>,
) -> Result<(Vec<Vec<S>>, Vec<S>)> {
    let mut out = Vec::new();
    let mut vals = Vec::new();
    while !basis.is_empty() {
        let pivot = match basis.iter().position(|v| !m.value(v).is_zero()) {
            Some(i) => i,
            None => {
                // Hyperbolic substitution u_i <- u_i + u_j.
                let (i, j) = (0..basis.len())
                    .flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| !m.bilinear(&basis[i], &basis[j]).is_zero())
                    .ok_or(Error::DegenerateForm)?;
                basis[i] = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(a, b)| a.clone() + b.clone())
                    .collect();
                i
            }
        };
        let v = basis.remove(pivot);
        let qv = m.value(&v);
        for u in basis.iter_mut() {
            let c = m.bilinear(u, &v) / qv.clone();
            *u = u
                .iter()
                .zip(&v)
                .map(|(a, b)| a.clone() - c.clone() * b.clone())
                .collect();
        }
        out.push(v);
        vals.push(qv);
    }
    Ok((out, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Ring};
    use num_traits::{One, Zero};

    type RF = RationalFunction;

    fn c(x: i64) -> RF {
        RF::from_i64(x)
    }

    #[test]
    fn already_normal_is_fixed() {
        let m = GramMatrix::<RF>::normal_form(&[RF::one()]);
        let p = vec![c(1), c(0), c(0), c(0)];
        let nf = normalize_quadric(&m, &p).unwrap();
        let id: Matrix<RF> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { c(1) } else { c(0) }).collect())
            .collect();
        assert_eq!(nf.transform, id);
        assert_eq!(nf.normal, m);
        assert!(nf.scalar.is_one());
    }

    #[test]
    fn hyperbolic_plus_t() {
        // x0 x1 + x2^2 + t x3^2
        let h = RF::from_rational(&rat(1, 2));
        let z = RF::zero;
        let m = GramMatrix::new(vec![
            vec![z(), h.clone(), z(), z()],
            vec![h, z(), z(), z()],
            vec![z(), z(), c(1), z()],
            vec![z(), z(), z(), RF::t()],
        ]);
        let nf = normalize_quadric(&m, &[c(1), c(0), c(0), c(0)]).unwrap();
        assert!(nf.scalar.is_one());
        assert_eq!(nf.mus, vec![RF::t()]);
        assert_eq!(m.congruent(&nf.transform), nf.normal);
        assert!(nf.determinant_class_preserved);
    }

    #[test]
    fn rejects_bad_input() {
        let m = GramMatrix::<RF>::normal_form(&[c(1)]);
        assert_eq!(
            normalize_quadric(&m, &[c(0), c(1), c(0), c(0)]),
            Err(Error::PointNotOnQuadric)
        );
        let degenerate = GramMatrix::<RF>::normal_form(&[c(0)]);
        assert_eq!(
            normalize_quadric(&degenerate, &[c(1), c(0), c(0), c(0)]),
            Err(Error::DegenerateForm)
        );
    }

    #[test]
    fn works_over_rationals_with_scalar() {
        // x0 x2 + 3 x1^2 + 3 x3^2 over Q: complement <3, 3> represents no square.
        let m = GramMatrix::new(vec![
            vec![int(0), int(0), rat(1, 2), int(0)],
            vec![int(0), int(3), int(0), int(0)],
            vec![rat(1, 2), int(0), int(0), int(0)],
            vec![int(0), int(0), int(0), int(3)],
        ]);
        let nf = normalize_quadric(&m, &[int(1), int(0), int(0), int(0)]).unwrap();
        assert_eq!(nf.scalar, int(3));
        assert_eq!(nf.mus, vec![int(1)]);
        assert_eq!(m.congruent(&nf.transform), nf.normal.scaled(&nf.scalar));
    }
}
