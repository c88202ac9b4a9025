use num_bigint::BigInt;
use proptest::prelude::*;

use umemura::binform::Form;
use umemura::birgeom::{decide_maximality, squarefree_model, Maximality};
use umemura::fibration::build_fibration;
use umemura::pgl2equiv::{find_mobius_witness, verify_witness_exact, MobiusWitness, VerdictResult};
use umemura::{BinaryForm, Rational, RationalMobius, DEFAULT_PRECISION_CAP as CAP};

fn q(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Linear factor vanishing at `(p : r)`.
fn linear(p: i64, r: i64) -> BinaryForm {
    Form::new(vec![q(r), q(-p)])
}

fn mobius() -> impl Strategy<Value = RationalMobius> {
    prop::array::uniform4(-4i64..=4)
        .prop_filter("invertible", |e| e[0] * e[3] != e[1] * e[2])
        .prop_map(|e| RationalMobius::new(q(e[0]), q(e[1]), q(e[2]), q(e[3])))
}

/// Distinct points of `P^1` as `(p, r)` with `r` in {0, 1, 2}.
fn points(min: usize, max: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..=9, 0i64..=2), min..=max * 3).prop_map(move |raw| {
        let mut pts: Vec<(i64, i64)> = Vec::new();
        for (p, r) in raw {
            let p = if r == 0 { 1 } else { p };
            if !pts.iter().any(|&(a, b)| a * r == b * p) {
                pts.push((p, r));
            }
        }
        pts.truncate(max);
        pts
    })
}

/// A form with the given rational roots and multiplicities, times an
/// optional power of the irreducible `t0^2 + t1^2`.
fn build(roots: &[((i64, i64), u32)], quad: u32) -> BinaryForm {
    let base = Form::new(vec![q(1), q(0), q(1)]).pow(quad);
    roots
        .iter()
        .fold(base, |acc, &((p, r), e)| acc.mul(&linear(p, r).pow(e)))
}

/// Rational roots with multiplicities, and the power of `t0^2 + t1^2`.
type Rooted = (Vec<((i64, i64), u32)>, u32);

fn rooted_form() -> impl Strategy<Value = Rooted> {
    (points(0, 4), prop::collection::vec(1u32..=4, 4), 0u32..=2)
        .prop_map(|(pts, es, quad)| (pts.into_iter().zip(es).collect::<Vec<_>>(), quad))
        .prop_filter("even degree", |(roots, quad)| {
            let d: u32 = roots.iter().map(|r| r.1).sum::<u32>() + 2 * quad;
            d.is_multiple_of(2) && d <= 12
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maximality_is_mobius_invariant((roots, quad) in rooted_form(), alpha in mobius(), n in 3usize..=5) {
        let g = build(&roots, quad);
        let moved = g.substitute_mobius(&alpha).unwrap();
        let a = decide_maximality(&build_fibration(n, &g, CAP).unwrap(), CAP).unwrap();
        let b = decide_maximality(&build_fibration(n, &moved, CAP).unwrap(), CAP).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.distinct_roots_of_h, b.distinct_roots_of_h);
        prop_assert_eq!(a.certificate.chain.len(), b.certificate.chain.len());
    }

    #[test]
    fn chain_length_counts_halved_multiplicities((roots, quad) in rooted_form()) {
        let g = build(&roots, quad);
        let expected: u32 = roots.iter().map(|r| r.1 / 2).sum::<u32>() + 2 * (quad / 2);
        let (model, chain) = squarefree_model(&build_fibration(3, &g, CAP).unwrap(), CAP).unwrap();
        prop_assert_eq!(chain.len() as u32, expected);
        let odd = roots.iter().filter(|r| r.1 % 2 == 1).count() as u32 + 2 * (quad % 2);
        prop_assert_eq!(model.g().degree() as u32, odd);
    }

    #[test]
    fn squarefree_forms_with_four_roots_are_fixed(pts in points(4, 8)) {
        prop_assume!(pts.len() >= 4 && pts.len() % 2 == 0);
        let g = build(&pts.iter().map(|&p| (p, 1)).collect::<Vec<_>>(), 0);
        let x = build_fibration(4, &g, CAP).unwrap();
        let (model, chain) = squarefree_model(&x, CAP).unwrap();
        prop_assert!(chain.is_empty());
        prop_assert!(verify_witness_exact(&g, model.g(), &RationalMobius::identity()).unwrap().is_some());
        prop_assert_eq!(decide_maximality(&x, CAP).unwrap().verdict, Maximality::Maximal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn equivalence_is_symmetric_and_transitive(pts in points(4, 6), a in mobius(), b in mobius()) {
        prop_assume!(pts.len() >= 4);
        let h1 = build(&pts.iter().map(|&p| (p, 1)).collect::<Vec<_>>(), 0);
        let h2 = h1.substitute_mobius(&a).unwrap();
        let h3 = h2.substitute_mobius(&b).unwrap();
        let w = |x: &BinaryForm, y: &BinaryForm| {
            let v = find_mobius_witness(x, y, CAP).unwrap();
            assert_eq!(v.result, VerdictResult::Equivalent);
            match v.witness {
                Some(MobiusWitness::Rational(m)) => m,
                other => panic!("expected a rational witness, got {other:?}"),
            }
        };
        let (w12, w21, w23) = (w(&h1, &h2), w(&h2, &h1), w(&h2, &h3));
        prop_assert!(verify_witness_exact(&h2, &h1, &w21).unwrap().is_some());
        let w13 = w23.compose(&w12);
        prop_assert!(verify_witness_exact(&h1, &h3, &w13).unwrap().is_some());

        // the verdict on a perturbed target does not depend on the order
        let mut c = h3.coeffs().to_vec();
        c[1] += q(1);
        let other = Form::new(c);
        let fwd = find_mobius_witness(&h1, &other, CAP).unwrap().result;
        let back = find_mobius_witness(&other, &h1, CAP).unwrap().result;
        prop_assert_eq!(fwd, back);
    }
}
