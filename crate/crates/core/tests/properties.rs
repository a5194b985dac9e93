//! Property-based invariants of the exact arithmetic, root finding,
//! permutation groups and monodromy tracking.

use arcsection::germ::{branch_count, puiseux_branch_count, PlaneCurveGerm};
use arcsection::group::{generated_group, is_transitive, Permutation};
use arcsection::monodromy::{track_circle, FiberFamily, TrackOptions};
use arcsection::polyarith::{
    discriminant_raw, gcd, parse_poly, rat, ratio, rational_roots_with_rest, resultant, univariate_roots, MPoly,
    Rational,
};
use num_complex::Complex64;
use proptest::prelude::*;

const XY: [&str; 2] = ["x", "y"];

fn small_poly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec((0u32..4, 0u32..4, -5i64..=5, 1i64..=3), 0..6).prop_map(|terms| {
        let mut p = MPoly::zero(&XY);
        for (i, j, n, d) in terms {
            p = &p + &MPoly::monomial(ratio(n, d), &XY, &[i, j]);
        }
        p
    })
}

fn linear_product(roots: &[i64]) -> MPoly {
    let z = MPoly::var("z", &["z"]);
    roots.iter().fold(MPoly::one(&["z"]), |acc, &r| {
        &acc * &(&z - &MPoly::constant(rat(r), &["z"]))
    })
}

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn text_round_trip(a in small_poly()) {
        let back = parse_poly(&a.to_string(), &XY).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn gcd_divides_and_contains_common_factor(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (&a * &c, &b * &c);
        let g = gcd(&ac, &bc);
        prop_assert!(ac.exact_div(&g).is_some());
        prop_assert!(bc.exact_div(&g).is_some());
        prop_assert!(g.exact_div(&c).is_some(), "gcd {} misses common factor {}", g, c);
    }

    #[test]
    fn resultant_vanishes_exactly_on_common_roots(r in prop::collection::vec(-6i64..=6, 1..4), s in -6i64..=6) {
        let f = linear_product(&r);
        let g = linear_product(&[s]);
        let res = resultant(&f, &g, "z");
        prop_assert_eq!(res.is_zero(), r.contains(&s));
    }

    #[test]
    fn discriminant_detects_repeated_roots(r in prop::collection::vec(-5i64..=5, 2..5)) {
        let f = linear_product(&r);
        let mut sorted = r.clone();
        sorted.sort();
        sorted.dedup();
        let disc = discriminant_raw(&f, "z").unwrap();
        prop_assert_eq!(disc.is_zero(), sorted.len() < r.len());
    }

    #[test]
    fn certified_roots_enclose_integer_roots(r in prop::collection::btree_set(-8i64..=8, 1..6)) {
        let roots: Vec<i64> = r.into_iter().collect();
        let f = linear_product(&roots);
        let coeffs: Vec<Complex64> = (0..=f.degree_in("z"))
            .map(|k| {
                let c = f.coeff(&[k]);
                Complex64::new(arcsection::polyarith::rat_to_f64(&c), 0.0)
            })
            .collect();
        let boxes = univariate_roots(&coeffs).unwrap();
        prop_assert_eq!(boxes.len(), roots.len());
        for x in &roots {
            let z = Complex64::new(*x as f64, 0.0);
            prop_assert!(boxes.iter().any(|b| (b.center() - z).norm() <= b.radius.max(1e-9)));
        }
    }

    #[test]
    fn rational_roots_are_recovered(r in prop::collection::vec((-6i64..=6, 1i64..=4), 1..4), q in 1i64..=5) {
        // (w² + q) has no rational roots.
        let w = MPoly::var("w", &["w"]);
        let mut f = &(&w * &w) + &MPoly::constant(rat(q), &["w"]);
        let mut expected: Vec<Rational> = Vec::new();
        for (n, d) in &r {
            let root = ratio(*n, *d);
            f = &f * &(&w - &MPoly::constant(root.clone(), &["w"]));
            if !expected.contains(&root) {
                expected.push(root);
            }
        }
        let coeffs: Vec<Rational> = (0..=f.degree_in("w")).map(|k| f.coeff(&[k])).collect();
        let (found, rest) = rational_roots_with_rest(&coeffs);
        let mut got: Vec<Rational> = found.iter().map(|(x, _)| x.clone()).collect();
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
        prop_assert_eq!(rest.len(), 3);
        let total: u32 = found.iter().map(|(_, m)| *m).sum();
        prop_assert_eq!(total as usize, r.len());
    }

    #[test]
    fn permutation_laws(p in permutation(7)) {
        let d = p.degree();
        prop_assert_eq!(Permutation::from_cycles(&p.cycle_notation(), d).unwrap(), p.clone());
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert!(p.pow(p.order()).is_identity());
        prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), d);
        prop_assert_eq!(is_transitive(&p), p.cycle_type() == vec![d]);
    }

    #[test]
    fn cyclic_groups(p in permutation(6), k in 0u64..6) {
        let g = generated_group(&p, &p.pow(k)).unwrap();
        prop_assert!(g.commuting);
        prop_assert_eq!(g.order as u64, p.order());
        if is_transitive(&p) {
            prop_assert!(g.has_transitive);
        }
        let census: usize = g.cycle_type_census.values().sum();
        prop_assert_eq!(census, g.order);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `z^d = c·t^k` has `gcd(d, k)` branches: the tracked permutation has
    /// that many cycles, agrees with its braid word, and with the Newton and
    /// Puiseux branch counts.
    #[test]
    fn quasi_homogeneous_monodromy(d in 2u32..=5, k in 1u32..=7, c in 1i64..=4, sign in prop::bool::ANY) {
        let c = if sign { c } else { -c };
        let g = parse_poly(&format!("z^{d} - ({c})*t^{k}"), &["t", "z"]).unwrap();
        let fam = FiberFamily::from_germ(&g, "t", "z");
        let opts = TrackOptions { braids: true, ..TrackOptions::default() };
        let o = track_circle(&fam, Complex64::new(0.0, 0.0), 0.5, None, &opts).unwrap();
        let expected = num_integer::gcd(d, k) as usize;
        prop_assert_eq!(o.permutation.cycle_count(), expected);
        prop_assert_eq!(o.braid.unwrap().permutation(), o.permutation.clone());
        let germ = PlaneCurveGerm::new(g, false).unwrap();
        prop_assert_eq!(branch_count(&germ).unwrap().count, expected);
        prop_assert_eq!(puiseux_branch_count(&germ).unwrap().0, expected);
    }

    /// Adding higher-order terms does not change the branch count of a
    /// Newton-nondegenerate germ, and the two oracles agree.
    #[test]
    fn branch_count_oracles_agree(a in 2u32..=4, b in 1u32..=6, extra in prop::collection::vec((0u32..3, 1i64..=3), 0..3)) {
        let mut s = format!("z^{a} - t^{b}");
        for (j, c) in &extra {
            // t^e z^j with e·a + j·b > a·b lies above the Newton edge.
            let e = b + 1;
            s.push_str(&format!(" + {c}*t^{e}*z^{j}"));
        }
        let g = parse_poly(&s, &["t", "z"]).unwrap();
        let germ = PlaneCurveGerm::new(g, false).unwrap();
        let bc = branch_count(&germ).unwrap();
        let (pc, _) = puiseux_branch_count(&germ).unwrap();
        prop_assert_eq!(bc.count, pc, "{}", s);
        prop_assert_eq!(bc.count, num_integer::gcd(a, b) as usize, "{}", s);
    }
}
