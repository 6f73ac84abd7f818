use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitlab::cmindex::{check_axioms, gen_c, hasse_diagram, hasse_diagram_bruteforce, CMShape};
use splitlab::field::{Gf, Matrix, TruncSeries};
use splitlab::hasse::{datum_property_failures, random_datum, random_unitary, search_space, stratum9};
use splitlab::localmodel::{enumerate, interpolate_degree, Budget};
use splitlab::pimodule::{Pairing, PiSpace, FormCase, Subspace};
use splitlab::weights::{criterion_indexes, orbit_dominance_oracle, Weight};

const ORDERS: &[u32] = &[2, 3, 4, 5, 7, 8, 9, 11, 25, 27];

fn gf_strategy() -> impl Strategy<Value = Arc<Gf>> {
    proptest::sample::select(ORDERS).prop_map(|q| Arc::new(Gf::from_order(q).unwrap()))
}

fn matrix(gf: &Gf, rows: usize, cols: usize, seed: &[u32]) -> Matrix {
    let q = gf.order();
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|i| seed[i % seed.len()].wrapping_mul(i as u32 + 7) % q).collect())
}

fn decreasing(len: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-4i64..=4, len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(gf in gf_strategy(), x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let q = gf.order();
        let (x, y, z) = (x % q, y % q, z % q);
        prop_assert_eq!(gf.mul(x, gf.add(y, z)), gf.add(gf.mul(x, y), gf.mul(x, z)));
        prop_assert_eq!(gf.mul(gf.mul(x, y), z), gf.mul(x, gf.mul(y, z)));
        prop_assert_eq!(gf.add(gf.sub(x, y), y), x);
        if x != 0 {
            prop_assert_eq!(gf.mul(x, gf.inv(x).unwrap()), gf.one());
        }
        prop_assert_eq!(gf.frobenius(gf.mul(x, y)), gf.mul(gf.frobenius(x), gf.frobenius(y)));
        prop_assert_eq!(gf.frobenius(gf.add(x, y)), gf.add(gf.frobenius(x), gf.frobenius(y)));
        prop_assert_eq!(gf.frobenius_inv(gf.frobenius(x)), x);
        prop_assert_eq!(gf.pow(x, q as u64), x);
    }

    #[test]
    fn rank_nullity_and_inverse(gf in gf_strategy(), r in 1usize..6, c in 1usize..6, seed in proptest::collection::vec(any::<u32>(), 1..40)) {
        let a = matrix(&gf, r, c, &seed);
        prop_assert_eq!(gf.rank(&a) + gf.kernel(&a).cols(), c);
        prop_assert!(gf.mat_mul(&a, &gf.kernel(&a)).is_zero());
        let s = matrix(&gf, c, c, &seed);
        match gf.inverse(&s) {
            Some(inv) => {
                prop_assert_eq!(gf.mat_mul(&s, &inv), Matrix::identity(c));
                prop_assert_ne!(gf.det(&s), 0);
            }
            None => prop_assert_eq!(gf.det(&s), 0),
        }
    }

    #[test]
    fn det_is_multiplicative(gf in gf_strategy(), n in 1usize..5, s1 in proptest::collection::vec(any::<u32>(), 1..20), s2 in proptest::collection::vec(any::<u32>(), 1..20)) {
        let (a, b) = (matrix(&gf, n, n, &s1), matrix(&gf, n, n, &s2));
        prop_assert_eq!(gf.det(&gf.mat_mul(&a, &b)), gf.mul(gf.det(&a), gf.det(&b)));
    }

    #[test]
    fn subspace_dimension_formula(gf in gf_strategy(), n in 1usize..7, k1 in 0usize..5, k2 in 0usize..5, s1 in proptest::collection::vec(any::<u32>(), 1..30), s2 in proptest::collection::vec(any::<u32>(), 1..30)) {
        let u = Subspace::span(&gf, &matrix(&gf, n, k1, &s1));
        let w = Subspace::span(&gf, &matrix(&gf, n, k2, &s2));
        let sum = u.sum(&gf, &w).unwrap();
        let cap = u.intersect(&gf, &w).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + w.dim());
        prop_assert!(sum.contains(&gf, &u).unwrap() && u.contains(&gf, &cap).unwrap());
        prop_assert_eq!(u.frobenius(&gf).frobenius_inv(&gf), u.clone());
        prop_assert_eq!(Subspace::span(&gf, u.basis()), u);
    }

    #[test]
    fn alternating_perp_is_an_involution(gf in gf_strategy(), a in 1usize..3, extra in 0usize..2, k in 0usize..5, seed in proptest::collection::vec(any::<u32>(), 1..30)) {
        let space = PiSpace::standard(a, a + extra, gf.clone(), FormCase::default_for(gf.p())).unwrap();
        let w = Subspace::span(&gf, &matrix(&gf, space.dim(), k, &seed));
        let perp = space.orthogonal(&w, Pairing::Alternating).unwrap();
        prop_assert_eq!(perp.dim() + w.dim(), space.dim());
        prop_assert_eq!(space.orthogonal(&perp, Pairing::Alternating).unwrap(), w);
    }

    #[test]
    fn series_inverse(gf in gf_strategy(), n in 1usize..8, seed in proptest::collection::vec(any::<u32>(), 1..8)) {
        let q = gf.order();
        let mut c: Vec<u32> = (0..n).map(|i| seed[i % seed.len()].wrapping_add(i as u32) % q).collect();
        if c[0] == 0 {
            c[0] = 1;
        }
        let x = TruncSeries::from_coeffs(c, n);
        let inv = gf.s_inv(&x).unwrap();
        prop_assert_eq!(gf.s_mul(&x, &inv), TruncSeries::constant(1, n));
    }

    #[test]
    fn interpolation_recovers_degree(coeffs in proptest::collection::vec(0u64..5, 1..4)) {
        let eval = |q: u64| coeffs.iter().rev().fold(0u64, |acc, &c| acc * q + c);
        let samples: Vec<(u64, u64)> = [3u64, 5, 7, 9, 11].iter().map(|&q| (q, eval(q))).collect();
        let expected = coeffs.iter().rposition(|&c| c != 0);
        prop_assert_eq!(interpolate_degree(&samples).unwrap(), expected);
    }

    #[test]
    fn weight_criterion_matches_orbit_oracle(
        (k, l) in (1usize..4, 0usize..2).prop_flat_map(|(a, e)| (decreasing(a), decreasing(a + e)))
    ) {
        let w = Weight::new(k, l, 0).unwrap();
        for h in 0..w.a() {
            prop_assert_eq!(criterion_indexes(&w, h).unwrap(), orbit_dominance_oracle(&w, h).unwrap(), "h={}", h);
        }
    }

    #[test]
    fn cm_order_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = CMShape::random(&mut rng, 3, 3, 200);
        prop_assert!(check_axioms(&shape, 200).unwrap().passed());
        let elems = gen_c(&shape, 200).unwrap();
        prop_assert_eq!(elems.len() as u128, shape.cardinality());
        prop_assert_eq!(hasse_diagram(&elems), hasse_diagram_bruteforce(&elems));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stratum_label_is_unitary_invariant(q in proptest::sample::select(&[2u32, 3, 4, 5][..]), n in 1usize..3, seed in any::<u64>(), pick in any::<usize>()) {
        let gf = Arc::new(Gf::from_order(q).unwrap());
        let space = search_space(gf.clone(), n).unwrap();
        let points = enumerate(&space, Budget::new(1 << 20)).unwrap();
        let x = &points[pick % points.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unitary(&gf, &space.modified_form().gram, &mut rng).unwrap();
        let y = x.transform(&space, &g);
        prop_assert!(y.validate(&space).is_ok());
        prop_assert_eq!(y.invariants(&space).unwrap(), x.invariants(&space).unwrap());
    }

    #[test]
    fn random_data_are_consistent(q in proptest::sample::select(&[2u32, 4, 3, 9][..]), n in 1usize..4, seed in any::<u64>()) {
        let gf = Arc::new(Gf::from_order(q).unwrap());
        let space = search_space(gf.clone(), n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            let d = random_datum(&space, &mut rng).unwrap();
            prop_assert!(datum_property_failures(&d).unwrap().is_empty());
            let g = random_unitary(&gf, &space.modified_form().gram, &mut rng).unwrap();
            let e = d.transform(&g).unwrap();
            match (stratum9(&d), stratum9(&e)) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "labels differ under unitary change: {:?} vs {:?}", x, y),
            }
        }
    }
}
