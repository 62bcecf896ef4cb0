mod common;

use common::*;
use logsparse::sumset::{enumerate_sumset_below, membership, DEFAULT_FRONTIER_BUDGET};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sets() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1usize..=3, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| random_sparse_set(&mut rng, 12, 0.6))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn enumeration_matches_product(sets in sets(), bound in 1u64..20_000) {
        let family = manual_family(&sets, 2);
        let got = enumerate_sumset_below(&family, &big(bound), DEFAULT_FRONTIER_BUDGET).unwrap();
        let want: Vec<_> = naive_sumset(&sets).into_iter().filter(|&x| x <= bound).collect();
        prop_assert_eq!(got.members(), &bigs(&want)[..]);
    }

    #[test]
    fn restriction_is_enumeration_at_smaller_bound(sets in sets(), b1 in 1u64..20_000, b2 in 1u64..20_000) {
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        let family = manual_family(&sets, 2);
        let wide = enumerate_sumset_below(&family, &big(hi), DEFAULT_FRONTIER_BUDGET).unwrap();
        let narrow = enumerate_sumset_below(&family, &big(lo), DEFAULT_FRONTIER_BUDGET).unwrap();
        prop_assert_eq!(wide.restrict(&big(lo)), narrow);
    }

    #[test]
    fn membership_matches_enumeration(sets in sets(), target in 1u64..10_000) {
        let family = manual_family(&sets, 2);
        let in_sumset = naive_sumset(&sets).binary_search(&target).is_ok();
        let rep = membership(&family, &big(target));
        prop_assert_eq!(rep.is_some(), in_sumset);
        if let Some(rep) = rep {
            let best = lexicographic_first(&sets, target).unwrap();
            prop_assert_eq!(rep, bigs(&best));
        }
    }
}

fn lexicographic_first(sets: &[Vec<u64>], target: u64) -> Option<Vec<u64>> {
    let Some((head, rest)) = sets.split_first() else {
        return (target == 0).then(Vec::new);
    };
    head.iter().filter(|&&x| x <= target).find_map(|&x| {
        lexicographic_first(rest, target - x).map(|mut tail| {
            tail.insert(0, x);
            tail
        })
    })
}
