//! Factorization of univariate polynomials over the rationals.
//!
//! Zassenhaus with a single large prime: the prime is chosen above twice the
//! coefficient bound of any `lc * factor`, so modular factors recombine directly
//! with no Hensel lifting. Modular factoring is distinct-degree followed by
//! Cantor–Zassenhaus equal-degree splitting with a fixed-seed RNG, so the output
//! is deterministic.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::Poly;
use crate::scalar::Rational;

/// Irreducible factorization `f = content * prod p_i^{e_i}` with each `p_i`
/// primitive in `Z[x]` with positive leading coefficient. Factors are sorted
/// by degree, then coefficients.
pub fn factor_rational(f: &Poly<Rational>) -> (Rational, Vec<(Poly<Rational>, u32)>) {
    assert!(!f.is_zero(), "factoring the zero polynomial");
    let (content, _) = f.primitive_integer();
    let (_, parts) = f.squarefree_factors();
    let mut out = Vec::new();
    for (i, s) in parts.iter().enumerate() {
        if s.degree().unwrap_or(0) == 0 {
            continue;
        }
        let (_, prim) = s.primitive_integer();
        for p in factor_squarefree_integer(&prim) {
            out.push((Poly::from_integers(&p), (i + 1) as u32));
        }
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| cmp_coeffs(a.0.coeffs(), b.0.coeffs()))
    });
    (content, out)
}

fn cmp_coeffs(a: &[Rational], b: &[Rational]) -> std::cmp::Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Factors a squarefree primitive integer polynomial (ascending coefficients,
/// positive leading coefficient) into irreducibles over `Z`.
pub fn factor_squarefree_integer(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let d = f.len() - 1;
    if d <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f[d].abs();
    let norm_sq: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm_sq.sqrt() + BigInt::one();
    let bound = BigInt::from(2) * &lc * (BigInt::one() << d) * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut candidate = &bound + BigInt::one();
    loop {
        candidate = next_prime(&candidate);
        let p = candidate.clone();
        candidate += BigInt::one();
        if (&lc % &p).is_zero() {
            continue;
        }
        let fp = reduce(f, &p);
        let dfp = reduce(&derivative(f), &p);
        let g = gcd_mod(&fp, &dfp, &p);
        if degree(&g) != 0 {
            continue;
        }
        let modular = factor_mod_p(&fp, &p, &mut rng);
        return recombine(f, modular, &p);
    }
}

fn recombine(f: &[BigInt], mut modular: Vec<Vec<BigInt>>, p: &BigInt) -> Vec<Vec<BigInt>> {
    let mut f = f.to_vec();
    let mut out = Vec::new();
    let mut s = 1;
    while 2 * s <= modular.len() {
        let mut found = false;
        let r = modular.len();
        let mut subset: Vec<usize> = (0..s).collect();
        loop {
            let lc = f[f.len() - 1].clone();
            let mut prod = vec![lc.mod_floor(p)];
            for &i in &subset {
                prod = mul_mod(&prod, &modular[i], p);
            }
            let cand = primitive(&symmetric(&prod, p));
            let fq = Poly::from_integers(&f);
            let cq = Poly::from_integers(&cand);
            if let Some(q) = fq.exact_div(&cq) {
                let (_, qi) = q.primitive_integer();
                let (content, _) = q.primitive_integer();
                if content.is_integer() {
                    out.push(cand);
                    f = qi;
                    let keep: Vec<Vec<BigInt>> = modular
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !subset.contains(i))
                        .map(|(_, m)| m.clone())
                        .collect();
                    modular = keep;
                    found = true;
                }
            }
            if found || !next_subset(&mut subset, r) {
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    out.push(f);
    out
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn primitive(c: &[BigInt]) -> Vec<BigInt> {
    let mut g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if c.last().is_some_and(|x| x.is_negative()) {
        g = -g;
    }
    c.iter().map(|x| x / &g).collect()
}

fn symmetric(c: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let half = p >> 1;
    c.iter()
        .map(|x| {
            let x = x.mod_floor(p);
            if x > half {
                x - p
            } else {
                x
            }
        })
        .collect()
}

// ---- modular polynomial arithmetic (ascending coefficients in [0, p)) ----

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.len() > 1 && a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    if a.is_empty() {
        a.push(BigInt::zero());
    }
    a
}

fn degree(a: &[BigInt]) -> usize {
    a.len() - 1
}

fn is_zero(a: &[BigInt]) -> bool {
    a.len() == 1 && a[0].is_zero()
}

fn reduce(a: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    trim(a.iter().map(|c| c.mod_floor(p)).collect())
}

fn derivative(a: &[BigInt]) -> Vec<BigInt> {
    if a.len() <= 1 {
        return vec![BigInt::zero()];
    }
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

fn sub_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(p))
            .collect(),
    )
}

fn mul_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce(&out, p)
}

fn inv_mod(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    assert!(e.gcd.is_one(), "non-invertible residue");
    e.x.mod_floor(p)
}

fn rem_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let db = degree(b);
    if db == 0 {
        return vec![BigInt::zero()];
    }
    let inv = inv_mod(&b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return trim(r);
    }
    for k in (0..r.len() - db).rev() {
        let c = (&r[k + db] * &inv).mod_floor(p);
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] = (&r[k + j] - &c * bc).mod_floor(p);
        }
    }
    r.truncate(db);
    trim(r)
}

fn div_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let db = degree(b);
    let inv = inv_mod(&b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..r.len() - db).rev() {
        let c = (&r[k + db] * &inv).mod_floor(p);
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            r[k + j] = (&r[k + j] - &c * bc).mod_floor(p);
        }
        q[k] = c;
    }
    trim(q)
}

fn monic_mod(a: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let inv = inv_mod(&a[a.len() - 1], p);
    a.iter().map(|c| (c * &inv).mod_floor(p)).collect()
}

fn gcd_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !is_zero(&b) {
        let r = rem_mod(&a, &b, p);
        a = b;
        b = r;
    }
    if is_zero(&a) {
        a
    } else {
        monic_mod(&a, p)
    }
}

fn pow_mod(base: &[BigInt], e: &BigInt, m: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut result = vec![BigInt::one()];
    let mut b = rem_mod(base, m, p);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = rem_mod(&mul_mod(&result, &b, p), m, p);
        }
        if i + 1 < bits {
            b = rem_mod(&mul_mod(&b, &b, p), m, p);
        }
    }
    result
}

fn factor_mod_p(f: &[BigInt], p: &BigInt, rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let f = monic_mod(f, p);
    let x = vec![BigInt::zero(), BigInt::one()];
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&rest) >= 2 * i {
        h = pow_mod(&h, p, &rest, p);
        let g = gcd_mod(&rest, &sub_mod(&h, &x, p), p);
        if degree(&g) > 0 {
            equal_degree(&g, i, p, rng, &mut out);
            rest = div_mod(&rest, &g, p);
            h = rem_mod(&h, &rest, p);
        }
        i += 1;
    }
    if degree(&rest) > 0 {
        out.push(monic_mod(&rest, p));
    }
    out
}

fn equal_degree(
    g: &[BigInt],
    d: usize,
    p: &BigInt,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Vec<BigInt>>,
) {
    let n = degree(g);
    if n == d {
        out.push(g.to_vec());
        return;
    }
    let exp = (p.pow(d as u32) - BigInt::one()) >> 1;
    loop {
        let a: Vec<BigInt> = trim(
            (0..n)
                .map(|_| rng.gen_bigint_range(&BigInt::zero(), p))
                .collect(),
        );
        if degree(&a) == 0 {
            continue;
        }
        let b = sub_mod(&pow_mod(&a, &exp, g, p), &[BigInt::one()], p);
        let c = gcd_mod(g, &b, p);
        if degree(&c) > 0 && degree(&c) < n {
            let other = div_mod(g, &c, p);
            equal_degree(&c, d, p, rng, out);
            equal_degree(&monic_mod(&other, p), d, p, rng, out);
            return;
        }
    }
}

// ---- primality ----

fn next_prime(from: &BigInt) -> BigInt {
    let mut n = from.clone();
    if n.is_even() {
        n += 1;
    }
    while !is_probable_prime(&n) {
        n += 2;
    }
    n
}

/// Miller–Rabin with the first twelve prime bases (deterministic below 3.3e24).
pub fn is_probable_prime(n: &BigInt) -> bool {
    let small = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < &BigInt::from(2) {
        return false;
    }
    for &q in &small {
        let q = BigInt::from(q);
        if n == &q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &small {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..r {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn poly(c: &[i64]) -> Poly<Rational> {
        Poly::new(c.iter().map(|&x| int(x)).collect())
    }

    fn expand(content: &Rational, parts: &[(Poly<Rational>, u32)]) -> Poly<Rational> {
        parts
            .iter()
            .fold(Poly::constant(content.clone()), |acc, (p, e)| {
                &acc * &p.pow(*e)
            })
    }

    #[test]
    fn primes() {
        let ps: Vec<i64> = (0..40)
            .filter(|&n| is_probable_prime(&BigInt::from(n)))
            .collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_probable_prime(&BigInt::from(1_000_000_007i64)));
        assert!(!is_probable_prime(&BigInt::from(3_215_031_751i64)));
    }

    #[test]
    fn factors_products_of_known_irreducibles() {
        // (x^2+1)^2 (x-2) (3x+1) (x^4 - 10x^2 + 1)
        let f = &(&(&poly(&[1, 0, 1]).pow(2) * &poly(&[-2, 1])) * &poly(&[1, 3]))
            * &poly(&[1, 0, -10, 0, 1]);
        let (c, parts) = factor_rational(&f);
        assert_eq!(expand(&c, &parts), f);
        let degs: Vec<(usize, u32)> = parts
            .iter()
            .map(|(p, e)| (p.degree().unwrap(), *e))
            .collect();
        assert_eq!(degs, vec![(1, 1), (1, 1), (2, 2), (4, 1)]);
    }

    #[test]
    fn swinnerton_dyer_stays_irreducible() {
        let f = poly(&[1, 0, -10, 0, 1]);
        let (_, parts) = factor_rational(&f);
        assert_eq!(parts.len(), 1);
    }

    #[test]
    fn rational_content_is_reported() {
        let f = Poly::new(vec![int(-1), Rational::new(1.into(), 2.into())]);
        let (c, parts) = factor_rational(&f);
        assert_eq!(expand(&c, &parts), f);
    }
}
