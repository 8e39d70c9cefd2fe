use std::collections::HashSet;

use hereditary_core::boxes::Template;
use hereditary_core::kgraphon::{cut_distance, delta_cut, entropy_identity, CutMode, KDistribution, StepGraphon};
use hereditary_core::properties::{Pattern, PermutationBody, Property};
use hereditary_core::Family;
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn fixed(cases: u32, seed: u64) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(seed), ..ProptestConfig::default() }
}

fn distribution(k: u32) -> impl Strategy<Value = KDistribution> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], k as usize).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        if total == 0.0 {
            KDistribution::uniform(k)
        } else {
            KDistribution::new(raw.iter().map(|p| p / total).collect()).unwrap()
        }
    })
}

/// Equal-part step graphon with `m` parts; the upper triangle is drawn and
/// mirrored.
fn graphon(k: u32, m: usize) -> impl Strategy<Value = StepGraphon> {
    prop::collection::vec(distribution(k), m * (m + 1) / 2).prop_map(move |upper| {
        let mut grid = vec![KDistribution::uniform(k); m * m];
        let mut it = upper.into_iter();
        for a in 0..m {
            for b in a..m {
                let d = it.next().unwrap();
                grid[a * m + b] = d.clone();
                grid[b * m + a] = d;
            }
        }
        StepGraphon::equal_parts(k, m, grid).unwrap()
    })
}

fn any_graphon() -> impl Strategy<Value = StepGraphon> {
    (2u32..=4, 1usize..=4).prop_flat_map(|(k, m)| graphon(k, m))
}

proptest! {
    #![proptest_config(fixed(64, 0x1a7e_0001))]

    #[test]
    fn graphon_entropy_is_a_fraction(w in any_graphon()) {
        let e = w.entropy();
        prop_assert!((0.0..=1.0).contains(&e), "{}", e);
    }

    #[test]
    fn cut_distance_is_a_pseudometric(
        (u, v, w) in (2u32..=3).prop_flat_map(|k| (graphon(k, 2), graphon(k, 3), graphon(k, 4)))
    ) {
        let d = |a: &StepGraphon, b: &StepGraphon| cut_distance(a, b, CutMode::Exact).unwrap().value;
        prop_assert_eq!(d(&u, &v), d(&v, &u));
        prop_assert!(d(&u, &u).abs() < 1e-15);
        prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-9);
    }

    #[test]
    fn local_search_never_beats_exact((u, w) in (2u32..=4).prop_flat_map(|k| (graphon(k, 3), graphon(k, 4))), seed in any::<u64>()) {
        let exact = cut_distance(&u, &w, CutMode::Exact).unwrap();
        let local = cut_distance(&u, &w, CutMode::local_search(seed)).unwrap();
        prop_assert!(exact.exact && !local.exact);
        prop_assert!(local.value <= exact.value + 1e-12);
    }

    #[test]
    fn relabelled_parts_are_at_delta_zero(w in (2u32..=3, 2usize..=5).prop_flat_map(|(k, m)| graphon(k, m)), shift in 0usize..5) {
        let m = w.parts();
        let perm: Vec<usize> = (0..m).map(|i| (i + shift) % m).rev().collect();
        let p = w.permute_parts(&perm).unwrap();
        prop_assert!(delta_cut(&w, &p).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn tile_identity_holds(
        (n, k, masks) in (2u32..=8, 2u32..=4).prop_flat_map(|(n, k)| {
            let e = (n * (n - 1) / 2) as usize;
            (Just(n), Just(k), prop::collection::vec(1u64..(1u64 << k), e))
        })
    ) {
        let t = Template::new(Family::CompleteGraphEdges, n, k, masks).unwrap();
        let id = entropy_identity(&t).unwrap();
        prop_assert!(id.holds);
        prop_assert!((id.tile_identity - id.integral).abs() <= 1e-12);
        prop_assert!((id.discrepancy - (id.uncorrected_identity - id.integral)).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(fixed(32, 0x1a7e_0002))]

    #[test]
    fn embeddings_are_valid_and_distinct(
        (f, big, n) in prop_oneof![
            (1u32..=3, 0u32..=2).prop_map(|(a, d)| (Family::CompleteGraphEdges, a + 1, a + 1 + d)),
            (1u32..=3, 0u32..=2).prop_map(|(a, d)| (Family::HypercubeVertices, a, a + d)),
            (1u32..=3, 0u32..=4).prop_map(|(a, d)| (Family::ArithmeticProgressions, a, a + d)),
            (1u32..=3, 0u32..=3).prop_map(|(a, d)| (Family::OrderInjections, a, a + d)),
        ]
    ) {
        let embs: Vec<_> = f.embeddings(big, n).unwrap().collect();
        prop_assert_eq!(embs.len() as u128, f.embedding_count(big, n).unwrap());
        let mut seen = HashSet::new();
        for e in &embs {
            prop_assert!(f.is_embedding(e));
            prop_assert!(seen.insert(e.map.clone()));
        }
    }

    #[test]
    fn pattern_oracles_agree(
        pi in prop_oneof![Just(vec![1u32, 3, 2]), Just(vec![2, 1]), Just(vec![2, 3, 1]), Just(vec![1, 2, 3])],
        point in prop::collection::vec(0.0f64..1.0, 5),
    ) {
        let pattern = Pattern::new(pi.clone()).unwrap();
        let b = PermutationBody::new(pi).unwrap();
        // the forbidden body is the order polytope of the pattern itself
        let mut hit_forbidden = false;
        for emb in Family::OrderInjections.embeddings(b.sigma().len() as u32, 5).unwrap() {
            let y = emb.pull_back(&point);
            hit_forbidden |= hereditary_core::boxes::Body::contains(&b, &y);
        }
        prop_assert_eq!(pattern.contains(5, &point), !hit_forbidden);
    }
}

#[test]
fn permutation_bodies_partition_the_cube() {
    for n in 1..=6u32 {
        let mut total = num_rational::BigRational::from_integer(0.into());
        let sigma: Vec<u32> = (1..=n).collect();
        hereditary_core::combinatorics::for_each_permutation(&sigma, |s| {
            let v = PermutationBody::new(s.to_vec()).unwrap().volume_exact();
            let f = hereditary_core::combinatorics::factorial(n as u64).unwrap();
            assert_eq!(v * num_rational::BigRational::from_integer(f.into()), num_rational::BigRational::one());
            total += PermutationBody::new(s.to_vec()).unwrap().volume_exact();
        });
        assert!(total.is_one(), "n={n}");
    }
}
