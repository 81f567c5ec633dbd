use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use squeeze_core::markov::*;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn triple(a: i64, b: i64, c: i64) -> MarkovTriple {
    MarkovTriple::new(a, b, c).unwrap()
}

/// Every solution with entries <= n, by solving the quadratic in c.
fn brute_force_solutions(n: u64) -> BTreeSet<(u64, u64, u64)> {
    let mut out = BTreeSet::new();
    for a in 1..=n {
        for b in a..=n {
            // c^2 - 3ab c + (a^2 + b^2) = 0
            let (a2, b2) = ((a * a) as i128, (b * b) as i128);
            let p = 3 * (a * b) as i128;
            let disc = p * p - 4 * (a2 + b2);
            if disc < 0 {
                continue;
            }
            let r = (disc as f64).sqrt().round() as i128;
            for root in [r - 1, r, r + 1] {
                if root >= 0 && root * root == disc && (p + root) % 2 == 0 {
                    for c in [(p + root) / 2, (p - root) / 2] {
                        if c >= b as i128 && c <= n as i128 {
                            out.insert((a, b, c as u64));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn tree_up_to_500_matches_brute_force() {
    let tree: BTreeSet<(u64, u64, u64)> = enumerate_tree(&BigInt::from(500))
        .unwrap()
        .iter()
        .map(|t| {
            let e = t.entries();
            (e[0].to_u64().unwrap(), e[1].to_u64().unwrap(), e[2].to_u64().unwrap())
        })
        .collect();
    assert_eq!(tree, brute_force_solutions(500));
    assert!(tree.contains(&(5, 29, 433)));
}

#[test]
fn mutation_descends_to_root() {
    for t in enumerate_tree(&BigInt::from(10_000)).unwrap() {
        for slot in 0..3 {
            let (m, landed) = mutate_tracked(&t, slot);
            assert_eq!(mutate(&m, landed), t);
        }
        if t == MarkovTriple::root() {
            continue;
        }
        let smaller = (0..3).map(|s| mutate(&t, s)).filter(|m| m.max_entry() < t.max_entry()).count();
        assert_eq!(smaller, 1, "{t}");
    }
}

#[test]
fn branch_matches_vieta_recursion() {
    // m_{k+2} m_{k-1} = m_{k+1}^2 + m_k^2, an independent route to the same sequence
    let mut oracle: Vec<BigUint> = vec![BigUint::one(); 3];
    for k in 1..=10usize {
        let next = (&oracle[k + 1] * &oracle[k + 1] + &oracle[k] * &oracle[k]) / &oracle[k - 1];
        oracle.push(next);
    }
    let m = branch_sequence(12);
    assert_eq!(m.len(), 13);
    for (a, b) in m.iter().zip(&oracle) {
        assert_eq!(a.to_biguint().unwrap(), *b);
    }
    for n in 0..=10 {
        assert!(is_markov(&m[n + 2], &m[n + 1], &m[n]).unwrap());
    }
}

#[test]
fn chart_lattice_saturation_by_enumeration() {
    // every integer point of the image plane near the translation has an
    // integral preimage
    for t in [triple(1, 1, 1), triple(1, 1, 2), triple(1, 2, 5), triple(2, 5, 29)] {
        for slot in 0..3 {
            let ch = chart_embedding(&t, slot).unwrap();
            let [a, b, c] = &ch.roles;
            let w = [a * a, b * b, c * c];
            let base: Vec<BigInt> = ch.translation.iter().map(|x| x.to_integer()).collect();
            let mut checked = 0;
            for d1 in -6i64..=6 {
                for d2 in -6i64..=6 {
                    // solve w0*d0 + w1*d1 + w2*d2 = 0 for integer d0
                    let rest = &w[1] * d1 + &w[2] * d2;
                    if !(&rest % &w[0]).is_zero() {
                        continue;
                    }
                    let d0 = -(rest / &w[0]);
                    let y = [&base[0] + d0, &base[1] + d1, &base[2] + d2].map(Q::from_integer);
                    let x = ch.pull_back(&y).unwrap();
                    assert!(x.x.is_integer() && x.y.is_integer(), "{t} slot {slot}");
                    checked += 1;
                }
            }
            assert!(checked > 0);
        }
    }
}

#[test]
fn vertex_charts_agree_up_to_affine_equivalence() {
    let t = triple(2, 5, 29);
    let alpha = q(3, 2);
    let tris: Vec<_> = (0..3).map(|s| build_triangle_with_chart(&t, &alpha, s).unwrap().realization).collect();
    for i in 0..3 {
        for j in 0..3 {
            let m = is_aff_equivalent(&tris[i], &tris[j]).expect("charts must agree");
            assert!(tris[i].map(&m).contains_vertex_set(&tris[j]));
        }
    }
    let a = build_triangle_with_chart(&triple(1, 2, 5), &q(10, 1), 0).unwrap();
    let b = build_triangle_with_chart(&triple(1, 2, 5), &q(10, 1), 2).unwrap();
    assert_eq!(canonical_form(&a.realization).unwrap().0, canonical_form(&b.realization).unwrap().0);
}

#[test]
fn triangle_identities_over_the_tree() {
    let triples = enumerate_tree(&BigInt::from(2000)).unwrap();
    for t in &triples {
        for alpha in [q(1, 2), q(1, 1), q(29, 10), q(7, 3)] {
            let tri = build_triangle(t, &alpha).unwrap();
            let r = &tri.realization;
            assert_eq!(r.area(), &alpha * &alpha / q(2, 1));
            assert_eq!(r.affine_perimeter(), &alpha * q(3, 1));
            for i in 0..3 {
                assert_eq!(r.edge_affine_length(i) * r.affine_height(i) / q(2, 1), r.area());
            }
        }
    }
}

#[test]
fn heights_decrease_along_the_branch() {
    let alpha = q(299, 100);
    let r = find_fitting_triple(&alpha).unwrap();
    let FitResult::Fit { trace, fit, .. } = r else { panic!("expected a fit") };
    assert!(fit.height < Q::one());
    for w in trace.windows(2) {
        assert!(w[1].longest_edge_height < w[0].longest_edge_height);
    }
    let m = branch_sequence(trace.len() + 3);
    for s in trace.iter().filter(|s| s.n >= 1) {
        let n = s.n;
        let expected = &alpha / (q(3, 1) - Q::new(m[n - 1].clone(), &m[n + 1] * &m[n]));
        assert_eq!(s.longest_edge_height, expected);
    }
}

#[test]
fn fit_result_json_uses_fraction_strings() {
    let r = find_fitting_triple(&q(29, 10)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["kind"], "Fit");
    assert_eq!(v["fit"]["height"], "841/866");
    assert_eq!(v["triangle"]["triple"], serde_json::json!(["5", "29", "433"]));
    let nf = serde_json::to_value(find_fitting_triple(&q(3, 1)).unwrap()).unwrap();
    assert_eq!(nf["kind"], "NoFit");
    assert_eq!(nf["certificate"]["alpha"], "3");
}

fn unimodular() -> impl Strategy<Value = IntAffineMap2> {
    (-5i64..=5, -5i64..=5, -5i64..=5, -5i64..=5, -20i64..=20, 1i64..=7, -20i64..=20, 1i64..=7)
        .prop_filter("det must be +-1", |(a, b, c, d, ..)| (a * d - b * c).abs() == 1)
        .prop_map(|(a, b, c, d, tx, dx, ty, dy)| {
            IntAffineMap2::from_i64([[a, b], [c, d]], QPoint::new(q(tx, dx), q(ty, dy))).unwrap()
        })
}

fn rational_point() -> impl Strategy<Value = QPoint> {
    (-30i64..=30, 1i64..=9, -30i64..=30, 1i64..=9).prop_map(|(a, b, c, d)| QPoint::new(q(a, b), q(c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn affine_quantities_are_invariant(m in unimodular(), p in rational_point(), a in rational_point(), b in rational_point()) {
        prop_assume!(a != b);
        prop_assert_eq!(affine_length(&a, &b).unwrap(), affine_length(&m.apply(&a), &m.apply(&b)).unwrap());
        let dir = &b - &a;
        let img_dir = m.apply_linear(&dir);
        prop_assert_eq!(
            affine_distance(&p, &a, &dir).unwrap(),
            affine_distance(&m.apply(&p), &m.apply(&a), &img_dir).unwrap()
        );
    }

    #[test]
    fn affine_length_scales(a in rational_point(), b in rational_point(), s in 1i64..50, d in 1i64..50) {
        prop_assume!(a != b);
        let s = q(s, d);
        prop_assert_eq!(affine_length(&a.scale(&s), &b.scale(&s)).unwrap(), &s * affine_length(&a, &b).unwrap());
    }

    #[test]
    fn canonical_form_is_a_group_invariant(m in unimodular(), a in rational_point(), b in rational_point(), c in rational_point()) {
        let Ok(t) = RationalTriangle::new(a, b, c) else { return Ok(()); };
        let (c1, m1) = canonical_form(&t).unwrap();
        let (c2, _) = canonical_form(&t.map(&m)).unwrap();
        prop_assert_eq!(&c1, &c2);
        prop_assert!(t.map(&m1).contains_vertex_set(&c1));
        prop_assert_eq!(canonical_form(&c1).unwrap().0, c1);
    }

    #[test]
    fn strip_fit_is_a_group_invariant(m in unimodular(), idx in 0usize..12, num in 1i64..30) {
        let triples = enumerate_tree(&BigInt::from(200)).unwrap();
        let t = &triples[idx % triples.len()];
        let tri = build_triangle(t, &q(num, 10)).unwrap().realization;
        let direct = fit_in_strip(&tri);
        let moved = fit_in_strip(&tri.map(&m));
        prop_assert_eq!(direct.is_some(), moved.is_some());
        if let Some(f) = direct {
            prop_assert!(f.verify(&tri));
        }
    }
}
