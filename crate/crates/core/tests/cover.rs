mod common;

use common::{two_level, two_level_instance as instance};
use oriented_cycles::cover::{build_cover_paths, build_hierarchy, check_cover, hall_double_matching};
use oriented_cycles::error::Error;
use oriented_cycles::graph::Sign;
use oriented_cycles::pattern::OrientationPattern;
use std::collections::BTreeSet;

#[test]
fn hierarchy_levels_match_hand_computation() {
    let d = two_level();
    let c = OrientationPattern::directed(40).unwrap();
    let inst = instance(&d, &c);
    let hier = build_hierarchy(&inst).unwrap();
    assert_eq!(hier.r, 2);
    assert_eq!(hier.plus, vec![vec![], vec![1, 2], vec![1, 2, 3]]);
    assert_eq!(hier.minus, vec![vec![], vec![5], vec![5, 6]]);
    assert_eq!(hier.index(0), Some(2));
    assert_eq!(hier.index(3), Some(1));
    assert_eq!(hier.index(1), Some(0));
    assert_eq!(hier.index(20), None);
}

#[test]
fn cover_paths_meet_every_guarantee() {
    let d = two_level();
    let c = OrientationPattern::directed(40).unwrap();
    let inst = instance(&d, &c);
    let hier = build_hierarchy(&inst).unwrap();
    let gp = hall_double_matching(&inst, &hier, Sign::Out).unwrap();
    let gm = hall_double_matching(&inst, &hier, Sign::In).unwrap();
    let cover = build_cover_paths(&inst, &hier, &gp, &gm).unwrap();
    assert!(check_cover(&inst, &hier, &cover).is_ok());

    let a: BTreeSet<usize> = (16..40).collect();
    let mut seen = BTreeSet::new();
    for p in &cover.paths {
        // Disjoint.
        for &w in &p.vertices {
            assert!(seen.insert(w), "{w} on two paths");
        }
        // Ends in A⁺ ∪ A⁻.
        assert!(a.contains(&p.vertices[0]) && a.contains(p.vertices.last().unwrap()));
        // Follows the pattern from its start position.
        for (k, w) in p.vertices.windows(2).enumerate() {
            let pos = (p.start_pos + k) % 40;
            let (u, v) = if c.forward(pos) { (w[0], w[1]) } else { (w[1], w[0]) };
            assert!(d.has_edge(u, v));
        }
        // Level index strictly drops away from the centre.
        let k = p.vertices.iter().position(|&w| w == p.center).unwrap();
        let right: Vec<usize> = p.vertices[k..].iter().map_while(|&w| hier.index(w)).collect();
        let left: Vec<usize> = p.vertices[..=k].iter().rev().map_while(|&w| hier.index(w)).collect();
        for side in [right, left] {
            assert!(side.windows(2).all(|w| w[1] < w[0]), "{side:?}");
        }
    }
    // Covers X ∪ B.
    for v in [0, 1, 2, 3, 5, 6] {
        assert!(seen.contains(&v), "{v} uncovered");
    }
}

#[test]
fn single_level_when_all_reach_a_directly() {
    let mut d = two_level();
    d.add_edge(3, 27);
    d.add_edge(6, 23);
    d.add_edge(39, 6);
    let c = OrientationPattern::directed(40).unwrap();
    let hier = build_hierarchy(&instance(&d, &c)).unwrap();
    assert_eq!(hier.r, 1);
}

#[test]
fn unreachable_b_vertex_is_reported() {
    let mut d = two_level();
    d.remove_edge(3, 24);
    d.remove_edge(3, 1);
    let c = OrientationPattern::directed(40).unwrap();
    match build_hierarchy(&instance(&d, &c)) {
        Err(Error::Hierarchy(left)) => assert_eq!(left, vec![3]),
        other => panic!("{other:?}"),
    }
}
