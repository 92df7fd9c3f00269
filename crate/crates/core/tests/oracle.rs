mod common;

use oriented_cycles::graph::Digraph;
use oriented_cycles::models::sample_dnp;
use oriented_cycles::oracle::{contains_all_patterns, find_embedding};
use oriented_cycles::pattern::{canonical_classes, OrientationPattern};
use oriented_cycles::rng::stream_rng;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_agrees_with_permutations(n in 3usize..=7, p in 0.2f64..0.9, mask in any::<u64>(), seed in any::<u64>(), npins in 0usize..3) {
        let mut rng = stream_rng(seed, 0);
        let d = sample_dnp(n, p, &mut rng).unwrap();
        let c = OrientationPattern::from_mask(n, mask & ((1 << n) - 1)).unwrap();
        let mut pins: Vec<(usize, usize)> = Vec::new();
        while pins.len() < npins {
            let (pos, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if pins.iter().all(|&(a, b)| a != pos && b != v) {
                pins.push((pos, v));
            }
        }
        let fast = find_embedding(&d, &c, &pins).unwrap();
        let slow = common::brute_embedding(&d, &c, &pins);
        prop_assert_eq!(fast.is_some(), slow.is_some());
        if let Some(e) = fast {
            prop_assert!(e.is_valid(&d, &c));
            for &(pos, v) in &pins {
                prop_assert_eq!(e.map[pos], v);
            }
        }
    }

    #[test]
    fn all_patterns_agrees_with_per_class_search(n in 3usize..=6, p in 0.3f64..0.95, seed in any::<u64>()) {
        let d = sample_dnp(n, p, &mut stream_rng(seed, 1)).unwrap();
        let verdict = contains_all_patterns(&d, &[]).unwrap();
        let classes = canonical_classes(n);
        let every = classes.iter().all(|c| common::brute_embedding(&d, c, &[]).is_some());
        prop_assert_eq!(verdict.all_contained, every);
        prop_assert_eq!(verdict.classes_required, classes.len());
    }

    #[test]
    fn rotations_and_reversal_preserve_containment(n in 3usize..=7, mask in any::<u64>(), r in 0usize..7, seed in any::<u64>()) {
        let d = sample_dnp(n, 0.5, &mut stream_rng(seed, 2)).unwrap();
        let c = OrientationPattern::from_mask(n, mask & ((1 << n) - 1)).unwrap();
        let a = find_embedding(&d, &c, &[]).unwrap().is_some();
        prop_assert_eq!(a, find_embedding(&d, &c.rotate(r % n), &[]).unwrap().is_some());
        prop_assert_eq!(a, find_embedding(&d, &c.reverse_complement(), &[]).unwrap().is_some());
    }
}

#[test]
fn missing_out_edge_blocks_directed_cycle() {
    let mut d = Digraph::complete(6);
    for v in 0..6 {
        d.remove_edge(2, v);
    }
    assert!(find_embedding(&d, &OrientationPattern::directed(6).unwrap(), &[]).unwrap().is_none());
    let anti = OrientationPattern::anti_directed(6).unwrap();
    assert_eq!(
        find_embedding(&d, &anti, &[]).unwrap().is_some(),
        common::brute_embedding(&d, &anti, &[]).is_some()
    );
}

#[test]
fn class_counts_small_n() {
    // Necklaces under rotation and reversal with complement, counted by brute force.
    for n in 3..=10 {
        let mut seen = std::collections::BTreeSet::new();
        for m in 0..1u64 << n {
            let c = OrientationPattern::from_mask(n, m).unwrap();
            let best = (0..n)
                .flat_map(|r| [c.rotate(r).mask(), c.reverse_complement().rotate(r).mask()])
                .min()
                .unwrap();
            seen.insert(best);
        }
        assert_eq!(canonical_classes(n).len(), seen.len(), "n={n}");
    }
}
