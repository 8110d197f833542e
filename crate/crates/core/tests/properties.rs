use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use setmap_core::constructions::{
    descent_chain, enumeration_mapping, interval_mapping, prefix_mapping, strictly_decreasing, EnumerationScheme,
};
use setmap_core::predicates::{free_reduction_equivalence, is_f_closed, is_free, is_g_free};
use setmap_core::search::{enumerate_free_sets, max_free_set, oracle_max_free_set, SearchConfig};
use setmap_core::{ElementSet, Flags, SetMapping};

fn random_mapping(n: usize, k: usize, flags: Flags, density: f64, seed: u64) -> SetMapping {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SetMapping::from_fn(n, k, None, flags, |t| {
        flags
            .allowed(t)
            .intersection(ElementSet::below(n))
            .difference(t)
            .iter()
            .filter(|_| rng.gen_bool(density))
            .collect()
    })
    .unwrap()
}

fn random_scheme(n: usize, seed: u64) -> EnumerationScheme {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let enumerations = (0..n)
        .map(|x| {
            let mut v: Vec<usize> = (0..x).collect();
            v.shuffle(&mut rng);
            v
        })
        .collect();
    EnumerationScheme::new(enumerations).unwrap()
}

fn arity() -> impl Strategy<Value = usize> {
    prop_oneof![Just(1usize), Just(2), Just(4)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn freeness_is_antitone(n in 5usize..11, k in arity(), seed: u64, h_bits: u64, sub_bits: u64) {
        let f = random_mapping(n, k, Flags::NONE, 0.15, seed);
        let h = ElementSet::from_bits(h_bits).intersection(ElementSet::below(n));
        let sub = h.intersection(ElementSet::from_bits(sub_bits));
        if is_free(&f, h).unwrap() {
            prop_assert!(is_free(&f, sub).unwrap());
        }
    }

    #[test]
    fn optimum_matches_the_oracle(n in 4usize..12, k in arity(), seed: u64, density in 0.05f64..0.5) {
        let f = random_mapping(n, k, Flags::NONE, density, seed);
        let fast = max_free_set(&f, &SearchConfig::default()).unwrap();
        let slow = oracle_max_free_set(&f).unwrap();
        prop_assert!(fast.same_result(&slow), "{:?} vs {:?}", fast, slow);
        prop_assert!(is_free(&f, fast.witness).unwrap());
        prop_assert_eq!(fast.witness.len(), fast.optimum);
    }

    #[test]
    fn shrinking_images_never_lowers_the_optimum(n in 4usize..11, k in arity(), seed: u64, keep in 0.0f64..1.0) {
        let f = random_mapping(n, k, Flags::NONE, 0.3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let smaller = SetMapping::from_fn(n, k, None, Flags::NONE, |t| {
            f.image(t).iter().filter(|_| rng.gen_bool(keep)).collect()
        }).unwrap();
        prop_assert!(smaller.is_contained_in(&f));
        let cfg = SearchConfig::default();
        prop_assert!(max_free_set(&smaller, &cfg).unwrap().optimum >= max_free_set(&f, &cfg).unwrap().optimum);
    }

    #[test]
    fn subsets_of_the_witness_stay_free(n in 4usize..12, k in arity(), seed: u64, mask: u64) {
        let f = random_mapping(n, k, Flags::NONE, 0.2, seed);
        let report = max_free_set(&f, &SearchConfig::default()).unwrap();
        prop_assert!(is_free(&f, report.witness.intersection(ElementSet::from_bits(mask))).unwrap());
    }

    #[test]
    fn worker_count_does_not_change_the_result(n in 6usize..13, k in arity(), seed: u64) {
        let f = random_mapping(n, k, Flags::NONE, 0.2, seed);
        let one = max_free_set(&f, &SearchConfig::default()).unwrap();
        let again = max_free_set(&f, &SearchConfig::default()).unwrap();
        let three = max_free_set(&f, &SearchConfig { workers: 3, ..SearchConfig::default() }).unwrap();
        prop_assert!(one.same_result(&again));
        prop_assert!(one.same_result(&three));
    }

    #[test]
    fn enumeration_is_consistent_with_the_optimum(n in 4usize..10, k in arity(), seed: u64) {
        let f = random_mapping(n, k, Flags::NONE, 0.25, seed);
        let cfg = SearchConfig::default();
        let opt = max_free_set(&f, &cfg).unwrap().optimum;
        prop_assert!(!enumerate_free_sets(&f, opt, &cfg).unwrap().is_empty());
        if opt < n {
            prop_assert!(enumerate_free_sets(&f, opt + 1, &cfg).unwrap().is_empty());
        }
    }

    #[test]
    fn interval_bounded_reduction(seed: u64, density in 0.0f64..1.0, h_bits: u64) {
        let f = random_mapping(10, 4, Flags::INTERVAL, density, seed);
        let h = ElementSet::from_bits(h_bits).intersection(ElementSet::below(10));
        prop_assert!(free_reduction_equivalence(&f, h).is_ok());
    }

    #[test]
    fn initial_segment_reduction(seed: u64, density in 0.0f64..1.0, h_bits: u64) {
        let f = random_mapping(10, 2, Flags::INITIAL_SEGMENT, density, seed);
        let h = ElementSet::from_bits(h_bits).intersection(ElementSet::below(10));
        prop_assert!(free_reduction_equivalence(&f, h).is_ok());
    }

    #[test]
    fn free_sets_give_decreasing_descent_chains(n in 3usize..11, seed: u64) {
        let scheme = random_scheme(n, seed);
        let f = enumeration_mapping(&scheme).unwrap();
        let cfg = SearchConfig::default();
        let opt = max_free_set(&f, &cfg).unwrap().optimum;
        let mut longest = 0;
        for m in 2..=opt {
            for h in enumerate_free_sets(&f, m, &cfg).unwrap() {
                let chain = descent_chain(&scheme, h);
                prop_assert!(strictly_decreasing(&chain), "{} gives {:?}", h, chain);
                longest = longest.max(chain.len());
            }
        }
        prop_assert!(opt <= longest + 1 || opt <= 2);
    }

    #[test]
    fn mapping_json_round_trip(n in 4usize..9, k in arity(), seed: u64) {
        let f = random_mapping(n, k, Flags::NONE, 0.3, seed);
        let text = f.to_json();
        let back = SetMapping::from_json(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn scheme_json_round_trip(n in 1usize..10, seed: u64) {
        let scheme = random_scheme(n, seed);
        let back = EnumerationScheme::from_json(&scheme.to_json()).unwrap();
        prop_assert_eq!(back, scheme);
    }
}

#[test]
fn empty_g_is_always_free_and_full_f_always_closed() {
    let interval = interval_mapping(9).unwrap();
    let prefix = prefix_mapping(9).unwrap();
    for bits in 0u64..1 << 9 {
        let u = ElementSet::from_bits(bits);
        assert!(is_g_free(&interval.empty_like(), u).unwrap());
        assert!(is_g_free(&prefix.empty_like(), u).unwrap());
        assert!(is_f_closed(&interval, u).unwrap());
        assert!(is_f_closed(&prefix, u).unwrap());
    }
}

#[test]
fn interval_mapping_free_sets_have_at_most_four_elements() {
    let cfg = SearchConfig::default();
    for n in 5..=14 {
        let f = interval_mapping(n).unwrap();
        assert_eq!(enumerate_free_sets(&f, 4, &cfg).unwrap().len() as u64, setmap_core::set::binomial(n, 4));
        assert!(enumerate_free_sets(&f, 5, &cfg).unwrap().is_empty());
    }
}

#[test]
fn prefix_mapping_free_sets_have_at_most_two_elements() {
    let cfg = SearchConfig::default();
    for n in 3..=14 {
        let f = prefix_mapping(n).unwrap();
        assert_eq!(enumerate_free_sets(&f, 2, &cfg).unwrap().len() as u64, setmap_core::set::binomial(n, 2));
        assert!(enumerate_free_sets(&f, 3, &cfg).unwrap().is_empty());
    }
}

#[test]
fn identity_schemes_satisfy_the_descent_property() {
    let cfg = SearchConfig::default();
    for n in 3..=12 {
        let scheme = EnumerationScheme::identity(n).unwrap();
        let f = enumeration_mapping(&scheme).unwrap();
        for m in 2..=n.min(4) {
            for h in enumerate_free_sets(&f, m, &cfg).unwrap() {
                assert!(strictly_decreasing(&descent_chain(&scheme, h)));
            }
        }
    }
}

#[test]
fn reduction_is_exhaustively_equivalent_on_fixed_constructions() {
    let interval = interval_mapping(10).unwrap();
    let prefix = prefix_mapping(10).unwrap();
    for bits in 0u64..1 << 10 {
        let h = ElementSet::from_bits(bits);
        assert_eq!(free_reduction_equivalence(&interval, h).unwrap(), h.len() <= 4);
        free_reduction_equivalence(&prefix, h).unwrap();
    }
}
