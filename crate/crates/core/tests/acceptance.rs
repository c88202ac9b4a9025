//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line on
//! standard error (written directly, so it shows without `--nocapture`).
//! Expected values come from closed formulas and small independent routines
//! in this file, not from the library's own helpers.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use umemura::binform::Form;
use umemura::birgeom::{
    decide_maximality, divide_by_square, terminal_to_quadric, validate_link, LinkKind, Maximality,
    MaximalityReason,
};
use umemura::fibration::{build_fibration, picard_mori};
use umemura::mpoly::MPoly;
use umemura::pgl2equiv::{
    find_mobius_witness, verify_witness, CertificateKind, Fingerprint, MobiusWitness, VerdictResult,
};
use umemura::report::printed_discrepancies;
use umemura::resolution::{
    extraction_info, resolve_point, tower_weighted_blowup, ExceptionalType, LocalModel,
};
use umemura::{BinaryForm, Rational, RationalMobius, DEFAULT_PRECISION_CAP as CAP};

fn q(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn line(id: u32, ok: bool, detail: &str, took: Duration) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id}: {status} - {detail} ({:.2}s)",
        took.as_secs_f64()
    );
}

// --- independent polynomial helpers (coefficient vectors) -------------------

fn conv(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

/// Remainder of ascending polynomials.
fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let c = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - b.len();
        for (j, y) in b.iter().enumerate() {
            r[shift + j] -= &c * y;
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(Rational::zero());
        }
    }
    r
}

fn gcd_degree(a: &[Rational], b: &[Rational]) -> usize {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    x.len() - 1
}

/// Squarefree in `P^1`: `t1` divides at most once and the affine part has a
/// constant gcd with its derivative.
fn squarefree_oracle(desc: &[Rational]) -> bool {
    let lead_zeros = desc.iter().take_while(|c| c.is_zero()).count();
    if lead_zeros > 1 {
        return false;
    }
    let affine: Vec<Rational> = trim(desc.iter().rev().cloned().collect());
    if affine.len() <= 2 {
        return true;
    }
    let deriv: Vec<Rational> = affine
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * q(i as i64))
        .collect();
    gcd_degree(&affine, &deriv) == 0
}

fn eval_form(f: &BinaryForm, t0: &Rational, t1: &Rational) -> Rational {
    let d = f.degree();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(t0.clone(), d - i) * num_traits::pow(t1.clone(), i))
        .sum()
}

fn random_mobius(rng: &mut ChaCha8Rng) -> RationalMobius {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-5..=5)).collect();
        if e[0] * e[3] - e[1] * e[2] != 0 {
            return RationalMobius::new(q(e[0]), q(e[1]), q(e[2]), q(e[3]));
        }
    }
}

fn linear(p: i64, r: i64) -> BinaryForm {
    // vanishes at (p : r)
    Form::new(vec![q(r), q(-p)])
}

/// `256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)` for the cross-ratio `l`.
fn j_of(l: Rational) -> Rational {
    let one = Rational::one();
    let num = q(256) * num_traits::pow(&l * &l - &l + &one, 3);
    num / (&l * &l * (&l - &one) * (&l - &one))
}

// --- criteria ---------------------------------------------------------------

fn criterion_1() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..500 {
        let d = rng.gen_range(0..=12);
        let mut c: Vec<Rational> = (0..=d).map(|_| q(rng.gen_range(-10..=10))).collect();
        if c.iter().all(Zero::is_zero) {
            c[0] = q(1);
        }
        // bias towards repeated factors
        let g = if rng.gen_bool(0.5) && d <= 6 {
            let base = Form::new(c);
            base.mul(&base)
        } else {
            Form::new(c)
        };
        let dec = g.squarefree_decompose().unwrap();
        let lhs: Vec<Rational> = g.coeffs().iter().map(|x| x * &dec.c).collect();
        let rhs = conv(&conv(dec.f.coeffs(), dec.f.coeffs()), dec.h.coeffs());
        if lhs != rhs || !squarefree_oracle(dec.h.coeffs()) {
            failures += 1;
        }
    }
    (
        failures == 0,
        format!("500 random forms, {failures} failures"),
    )
}

fn criterion_2() -> (bool, String) {
    let mut failures = Vec::new();
    for n in 3..=5usize {
        for k in 1..=8u32 {
            let model = LocalModel::simple(n, k).unwrap();
            let names = model.variable_names();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let l = resolve_point(&model).unwrap();
            let m = k.div_ceil(2) as usize;
            let mut ok = l.m == m && l.steps.len() == m && l.smoothness_certificate.passed;
            for (i, s) in l.steps.iter().enumerate().map(|(i, s)| (i + 1, s)) {
                if i < m && s.discrepancy != (i * (n - 2)) as i64 {
                    ok = false;
                }
                // Q(x) + t^(k - 2i) after the i-th blowup, while a chart of that shape exists
                if 2 * i <= k as usize {
                    let nv = n + 1;
                    let x = |j| MPoly::<Rational>::var(nv, j);
                    let mut expected = &x(1) * &x(1) - &x(0) * &x(2);
                    for j in 3..n {
                        expected = expected + &x(j) * &x(j);
                    }
                    expected = expected + x(n).pow(k - 2 * i as u32);
                    if s.strict_transform != expected.to_string_with(&names) {
                        ok = false;
                    }
                }
            }
            let want = if k % 2 == 0 {
                ExceptionalType::SmoothQuadric
            } else {
                ExceptionalType::ProjectiveSpace
            };
            ok &= l.final_type() == want;
            if !ok {
                failures.push(format!("(n={n}, k={k})"));
            }
        }
    }
    (
        failures.is_empty(),
        format!("24 ledgers over n=3..5, k=1..8; failing: {failures:?}"),
    )
}

fn criterion_3() -> (bool, String) {
    let mut ok = true;
    for n in 3..=6usize {
        for a in 0..=8usize {
            let g = Form::t0().pow(a as u32).mul(&Form::t1().pow(a as u32));
            let x = build_fibration(n, &g, CAP).unwrap();
            let pm = picard_mori(&x);
            let (ni, ai) = (n as i64, a as i64);
            ok &= pm.k_pairings[1] == ai - 2;
            ok &= pm.k_pairings[0] == pm.k_dot_e_adjunction && pm.k_dot_e_adjunction == -(ni - 1);
            let d = printed_discrepancies(&x, &[]);
            let class = d
                .iter()
                .find(|e| e.reference.starts_with("canonical class"));
            ok &= class.is_some_and(|e| {
                e.printed_value == format!("{}H + {}F", -(ni - 2), ai - 2)
                    && e.computed_value == format!("{}H + {}F", -(ni - 1), -((ni - 2) * ai + 2))
            });
            let ke = d.iter().find(|e| e.reference.starts_with("K.e "));
            ok &= ke.is_some_and(|e| {
                e.printed_value == (ni - 1).to_string() && e.computed_value == (1 - ni).to_string()
            });
        }
    }
    (
        ok,
        "K.sigma = a-2 (a=0..8), K.e = -(n-1) both ways (n=3..6), discrepancy entries".into(),
    )
}

fn criterion_4() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for i in 0..50 {
        let n = rng.gen_range(3..=6usize);
        // DivideBySquare: g = l^2 h
        let r = rng.gen_range(0..=3usize);
        let mut hc: Vec<Rational> = (0..=2 * r).map(|_| q(rng.gen_range(-9..=9))).collect();
        hc[0] = q(rng.gen_range(1..=9));
        let h = Form::new(hc);
        let l = loop {
            let (p, s) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            if (p, s) != (0, 0) {
                break Form::new(vec![q(p), q(s)]);
            }
        };
        let g = l.pow(2).mul(&h);
        let link = divide_by_square(n, &g, &l).unwrap();
        let cert = validate_link(&link);
        // pointwise: Q(x) + h (l xn)^2 = Q(x) + g xn^2 reduces to h l^2 = g
        let (t0, t1) = (q(rng.gen_range(-7..=7)), q(rng.gen_range(1..=7)));
        let lv = eval_form(&l, &t0, &t1);
        let pointwise = eval_form(&h, &t0, &t1) * &lv * &lv == eval_form(&g, &t0, &t1);
        if !cert
            .as_ref()
            .is_ok_and(|c| c.remainder == "0" && c.quotient == "1")
            || !pointwise
        {
            bad += 1;
        }
        // TerminalToQuadric: two distinct rational roots
        let (p1, p2) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6) + 13 + i % 3);
        let c = q(rng.gen_range(1..=5));
        let g2 = linear(p1, 1).mul(&linear(p2, 1)).scale(&c);
        let x = build_fibration(n, &g2, CAP).unwrap();
        let t = terminal_to_quadric(&x).unwrap();
        let ok = t.kind == LinkKind::TerminalToQuadric
            && validate_link(&t)
                .is_ok_and(|c| c.remainder == "0" && c.contracted_into_marked == Some(true));
        if !ok {
            bad += 1;
        }
    }
    (
        bad == 0,
        format!("50 instances of each link kind, {bad} nonzero remainders"),
    )
}

/// Returns (pass, detail, unexpected) where `unexpected` flags mismatches
/// outside the known `k = 1, b >= 2` family.
fn criterion_5() -> (bool, String, bool) {
    let mut mismatches = Vec::new();
    let mut unexpected = false;
    for n in [3usize, 4] {
        for k in 1..=6u32 {
            let model = LocalModel::simple(n, k).unwrap();
            for b in 1..=6u32 {
                let e = extraction_info(&model, b);
                let printed = k.min(2) as i64 - b as i64;
                // weighted order of Q(x) + t^k under weights (1, ..., 1, b)
                let derived = (2.min(b * k)) as i64 - b as i64;
                if e.second_ray_k_pairing != derived || e.is_link_seed != (k >= 2 && b == 1) {
                    unexpected = true;
                }
                if e.second_ray_k_pairing != printed {
                    if k != 1 {
                        unexpected = true;
                    }
                    if n == 3 {
                        mismatches.push(format!(
                            "k={k},b={b}: {} vs {printed}",
                            e.second_ray_k_pairing
                        ));
                    }
                }
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "min{k,2} - b reproduced for k, b = 1..6; link seeds exactly k >= 2, b = 1".to_string()
    } else {
        format!(
            "link seeds exactly k >= 2, b = 1; closed formula min{{k,2}} - b differs at {} (computed vs formula): {}",
            mismatches.len(),
            mismatches.join("; ")
        )
    };
    (mismatches.is_empty(), detail, unexpected)
}

fn criterion_6() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases: Vec<(BinaryForm, Maximality)> = vec![
        (Form::from_integers(&[1]), Maximality::Maximal),
        (Form::from_integers(&[0, 1, 0]), Maximality::NotMaximal),
        (Form::from_integers(&[0, 1, -3, 2, 0]), Maximality::Maximal),
        (
            Form::from_integers(&[0, 0, 1, 0, -1, 0, 0]),
            Maximality::NotMaximal,
        ),
    ];
    let mut ok = true;
    for (i, (g, want)) in cases.iter().enumerate() {
        let v = decide_maximality(&build_fibration(3, g, CAP).unwrap(), CAP).unwrap();
        ok &= v.verdict == *want;
        match i {
            1 => {
                ok &= v.certificate.reason == MaximalityReason::TwoRootsLinkToQuadric
                    && v.certificate
                        .terminal_link
                        .as_ref()
                        .is_some_and(|l| l.kind == LinkKind::TerminalToQuadric)
            }
            3 => {
                ok &= v.certificate.chain.len() == 2
                    && v.squarefree_model.coefficients == ["1", "0", "-1"]
                    && v.distinct_roots_of_h == 2
                    && v.certificate.reason == MaximalityReason::TwoRootsLinkToQuadric
            }
            _ => {}
        }
        for _ in 0..20 {
            let alpha = random_mobius(&mut rng);
            let gb = g.substitute_mobius(&alpha).unwrap();
            let w = decide_maximality(&build_fibration(3, &gb, CAP).unwrap(), CAP).unwrap();
            ok &= w.verdict == *want;
        }
    }
    (ok, "4 cases, each under 20 random substitutions".into())
}

fn criterion_7() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    for _ in 0..200 {
        let d = rng.gen_range(4..=10usize);
        let mut pts: Vec<(i64, i64)> = Vec::new();
        if rng.gen_bool(0.3) {
            pts.push((1, 0));
        }
        while pts.len() < d {
            let p = (rng.gen_range(-12..=12), rng.gen_range(1..=3));
            if !pts.iter().any(|&(a, b)| a * p.1 == b * p.0) {
                pts.push(p);
            }
        }
        let h = pts
            .iter()
            .fold(Form::one(), |acc, &(p, r)| acc.mul(&linear(p, r)));
        let h2 = h.substitute_mobius(&random_mobius(&mut rng)).unwrap();
        let v = find_mobius_witness(&h, &h2, CAP).unwrap();
        let ok = v.result == VerdictResult::Equivalent
            && v.certificate_kind == Some(CertificateKind::ExactWitness)
            && match &v.witness {
                Some(w @ MobiusWitness::Rational(a)) => {
                    let exact = verify_witness(&h, &h2, w).is_ok_and(|c| c.holds == Some(true));
                    // h2(a(p)) / h(p) is one constant at random points
                    let ratios: Vec<Rational> = (0..3)
                        .map(|i| {
                            let (t0, t1) = (q(i * 7 + 3), q(2 * i + 5));
                            let (s0, s1) = a.apply(&t0, &t1);
                            eval_form(&h2, &s0, &s1) / eval_form(&h, &t0, &t1)
                        })
                        .collect();
                    exact && ratios.windows(2).all(|w| w[0] == w[1]) && !ratios[0].is_zero()
                }
                _ => false,
            };
        if !ok {
            failures += 1;
        }
    }
    let h = Form::from_integers(&[0, 1, -3, 2, 0]);
    let h2 = Form::from_integers(&[0, 1, -4, 3, 0]);
    let v = find_mobius_witness(&h, &h2, CAP).unwrap();
    let fp = |f: &Fingerprint| match f {
        Fingerprint::Exact { values, .. } => values.clone(),
        _ => Vec::new(),
    };
    let separated = v.result == VerdictResult::Inequivalent
        && v.certificate_kind == Some(CertificateKind::FingerprintSeparation)
        && v.exhaustive_search
        && v.fingerprints.as_ref().is_some_and(|[a, b]| {
            fp(a) == [j_of(q(2)).to_string()] && fp(b) == [j_of(q(3)).to_string()]
        });
    (
        failures == 0 && separated,
        format!(
            "200 random pairs, {failures} failures; {{0,1,2,inf}} vs {{0,1,3,inf}} separated by {} vs {}: {separated}",
            j_of(q(2)),
            j_of(q(3))
        ),
    )
}

fn criterion_8() -> (bool, String) {
    let mut ok = true;
    for n in 3..=5usize {
        for b in 1..=5u32 {
            let t = tower_weighted_blowup(n, b).unwrap();
            ok &= t.steps.len() == b as usize;
            let xs: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
            for (i, s) in t.steps.iter().enumerate() {
                let center = if i == 0 {
                    "origin".to_string()
                } else {
                    format!("Gamma_{i}")
                };
                let mut map = vec!["u".to_string()];
                map.extend(
                    xs.iter()
                        .map(|x| if i == 0 { format!("u*{x}") } else { x.clone() }),
                );
                map.push("u*t".into());
                ok &= s.center == center && s.chart_map == map && s.verified;
            }
            let mut weighted = vec!["u".to_string()];
            weighted.extend(xs.iter().map(|x| format!("u*{x}")));
            weighted.push(if b == 1 {
                "u*t".into()
            } else {
                format!("u^{b}*t")
            });
            ok &= t.weighted_chart == weighted;
        }
    }
    (
        ok,
        "b = 1..5, n = 3..5: b steps, centers and chart maps".into(),
    )
}

fn criterion_9() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_umemura");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("UMEMURA_PRECISION_CAP")
            .output()
            .unwrap()
    };
    let inputs = [
        (3, "t0^2*t1^2"),
        (3, "1"),
        (4, "t0*t1"),
        (3, "t0*t1*(t0-t1)*(t0-2*t1)"),
        (3, "t0^2*t1^2*(t0^2-t1^2)"),
        (5, "(t0^2+t1^2)^2*t0*t1"),
        (3, "t0^5*t1^3"),
        (4, "[\"1\", \"0\", \"-2\"]"),
        (3, "(t0^3-2*t1^3)^2*t0*t1"),
        (6, "t0^3*t1*(t0-t1)^2*(t0+t1)^2"),
    ];
    let mut ok = true;
    for (n, form) in inputs {
        let n = n.to_string();
        let a = run(&["analyze", "--n", &n, "--form", form]);
        let b = run(&["analyze", "--n", &n, "--form", form]);
        ok &= a.status.code() == Some(0) && a.stdout == b.stdout && !a.stdout.is_empty();
    }
    ok &= run(&["analyze", "--n", "3", "--form", "t0^2 + t1"])
        .status
        .code()
        == Some(2);
    ok &= run(&["analyze", "--n", "2", "--form", "t0*t1"])
        .status
        .code()
        == Some(2);
    ok &= run(&[
        "analyze",
        "--n",
        "3",
        "--form",
        "t0*t1*(t0^3-2*t1^3)*(t0-t1)",
        "--precision-cap",
        "16",
    ])
    .status
    .code()
        == Some(3);
    ok &= run(&["maximality", "--n", "4", "--form", "1"])
        .status
        .code()
        == Some(0);
    (
        ok,
        "10 inputs byte-identical across runs; exit codes 0/2/3".into(),
    )
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    let mut timed = |id: u32, f: &dyn Fn() -> (bool, String)| {
        let start = Instant::now();
        let (ok, detail) = f();
        line(id, ok, &detail, start.elapsed());
        results.push((id, ok, start.elapsed()));
    };
    timed(1, &criterion_1);
    timed(2, &criterion_2);
    timed(3, &criterion_3);
    timed(4, &criterion_4);
    let start = Instant::now();
    let (ok5, detail5, unexpected5) = criterion_5();
    line(5, ok5, &detail5, start.elapsed());
    timed(6, &criterion_6);
    timed(7, &criterion_7);
    timed(8, &criterion_8);
    timed(9, &criterion_9);

    // Criterion 5 is known to disagree with the closed formula at k = 1,
    // b >= 2; anything else there is a real failure.
    assert!(!unexpected5, "criterion 5: {detail5}");
    let failed: Vec<u32> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
