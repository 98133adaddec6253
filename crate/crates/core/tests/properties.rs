mod common;

use ncgarside::annulus_model::{parse_cycles, AffinePerm, Flavor};
use ncgarside::chain_system::{poset_to_chain_system, ChainSystem};
use ncgarside::labeled_poset::LabeledPoset;
use ncgarside::tube_combinatorics::{ext_nonzero, hom_ext_dims, hom_nonzero, TubeLetter};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn window(n: usize) -> impl Strategy<Value = Vec<i64>> {
    (Just((1..=n as i64).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(-2i64..=2, n))
        .prop_map(move |(perm, mut shifts)| {
            let total: i64 = shifts.iter().sum();
            shifts[0] -= total;
            perm.iter().zip(&shifts).map(|(p, s)| p + s * n as i64).collect()
        })
}

fn signed_gens(n: i64) -> impl Strategy<Value = Vec<(i64, i64, i64, bool)>> {
    prop::collection::vec((1..n, 1..n, -1i64..=1, any::<bool>()), 0..6)
}

fn signed_product(n: i64, flavor: Flavor, gens: &[(i64, i64, i64, bool)]) -> AffinePerm {
    let mut p = AffinePerm::identity(flavor, n);
    for &(a, b, j, neg) in gens {
        if a == b {
            continue;
        }
        let b = if neg { -b } else { b } + 2 * n * j;
        let g = parse_cycles(&format!("(({a} {b}))"), flavor, n).unwrap();
        p = p.mul(&g);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_system_poset_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::random_valid_system(&mut rng);
        prop_assert!(c.check_axioms().passes());
        let p = c.build_poset().unwrap();
        prop_assert_eq!(&poset_to_chain_system(&p).unwrap(), &c);
        let q = LabeledPoset::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(q.to_json(), p.to_json());
        prop_assert_eq!(&ChainSystem::from_json(&c.to_json(&[])).unwrap(), &c);
        prop_assert_eq!(p.maximal_chains().len(), c.len());
    }

    #[test]
    fn plain_group_laws((a, b, c) in (2usize..=6).prop_flat_map(|n| (window(n), window(n), window(n)))) {
        let (a, b, c) = (
            AffinePerm::from_window(&a).unwrap(),
            AffinePerm::from_window(&b).unwrap(),
            AffinePerm::from_window(&c).unwrap(),
        );
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert!(a.inverse().mul(&a).is_identity());
        prop_assert_eq!(AffinePerm::from_window(&a.window()).unwrap(), a.clone());
        for x in -10i64..=10 {
            prop_assert_eq!(a.mul(&b).eval_int(x), a.eval(b.eval_int(x)));
        }
    }

    #[test]
    fn plain_cycle_round_trip(w in (2usize..=6).prop_flat_map(window)) {
        let p = AffinePerm::from_window(&w).unwrap();
        let n = w.len() as i64;
        prop_assert_eq!(AffinePerm::from_cycles(Flavor::Plain, n, &p.to_cycles()).unwrap(), p.clone());
        prop_assert_eq!(parse_cycles(&p.to_string(), Flavor::Plain, n).unwrap(), p);
    }

    #[test]
    fn signed_symmetry_preserved((n, gens) in (3i64..=6).prop_flat_map(|n| (Just(n), signed_gens(n)))) {
        for flavor in [Flavor::Signed, Flavor::Barred] {
            let p = signed_product(n, flavor, &gens);
            prop_assert!(p.validate().is_ok());
            prop_assert!(p.inverse().validate().is_ok());
            prop_assert!(p.mul(&p.inverse()).is_identity());
            prop_assert_eq!(AffinePerm::from_cycles(flavor, n, &p.to_cycles()).unwrap(), p.clone());
        }
    }

    #[test]
    fn hom_ext_predicates_match_dimensions(r in 1usize..=6, b in 0usize..6, c in 0usize..6, k in 1usize..=12, l in 1usize..=12) {
        let (b, c) = (b % r, c % r);
        let (k, l) = (1 + (k - 1) % (2 * r), 1 + (l - 1) % (2 * r));
        let x = TubeLetter::new(0, r, b, k);
        let y = TubeLetter::new(0, r, c, l);
        let (h, e) = common::quiver_hom_ext(r, (b, k), (c, l));
        prop_assert_eq!(hom_ext_dims(r, (b, k), (c, l)), (h, e));
        prop_assert_eq!(hom_nonzero(&x, &y), h > 0);
        prop_assert_eq!(ext_nonzero(&x, &y), e > 0);
    }
}
