mod common;

use oriented_cycles::experiments::{check_process_properties, checkpoint_values, hitting_times};
use oriented_cycles::graph::Sign;
use oriented_cycles::process::{sample_process, ProcessTrace};
use oriented_cycles::rng::stream_rng;
use proptest::prelude::*;

fn order_of(t: &mut ProcessTrace) -> Vec<(usize, usize)> {
    let total = t.total();
    t.ensure(total).unwrap();
    t.materialized().iter().map(|&(a, b)| (a as usize, b as usize)).collect()
}

#[test]
fn hitting_times_match_recomputation() {
    for k in 0..50u64 {
        let n = 3 + (k as usize % 18);
        let mut t = sample_process(n, stream_rng(k, 40));
        let order = order_of(&mut t);
        let st = hitting_times(&mut t).unwrap();
        let (m0, m1, s, tt) = common::naive_hitting(n, &order);
        assert_eq!(st.m0, m0, "n={n} trace {k}");
        assert_eq!(st.m1, m1, "n={n} trace {k}");
        assert_eq!(st.s, s);
        assert_eq!(st.t, tt);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_is_a_permutation_of_all_pairs(n in 2usize..25, seed in any::<u64>()) {
        let mut t = sample_process(n, stream_rng(seed, 0));
        let order = order_of(&mut t);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        prop_assert_eq!(sorted, all);
    }

    #[test]
    fn trace_text_round_trip(n in 2usize..20, seed in any::<u64>(), upto in 0usize..50) {
        let mut t = sample_process(n, stream_rng(seed, 1));
        let text = t.to_text();
        let mut back = ProcessTrace::parse(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        let i = upto.min(t.total());
        prop_assert_eq!(back.prefix(i).unwrap().edges(), t.prefix(i).unwrap().edges());
    }

    #[test]
    fn prefixes_are_nested(n in 2usize..15, seed in any::<u64>(), a in 0usize..200, b in 0usize..200) {
        let mut t = sample_process(n, stream_rng(seed, 2));
        let (lo, hi) = (a.min(b).min(t.total()), a.max(b).min(t.total()));
        let small = t.prefix(lo).unwrap();
        let big = t.prefix(hi).unwrap();
        prop_assert_eq!(small.m(), lo);
        prop_assert!(small.edges().iter().all(|&(u, v)| big.has_edge(u, v)));
    }

    #[test]
    fn same_seed_same_trace(n in 2usize..30, seed in any::<u64>()) {
        let mut a = sample_process(n, stream_rng(seed, 3));
        let mut b = sample_process(n, stream_rng(seed, 3));
        prop_assert_eq!(a.to_text(), b.to_text());
    }
}

/// A trace on 40 vertices where vertex 0 has no edges before `i₁`, then closes a triangle before `i₃`.
fn planted_triangle() -> ProcessTrace {
    let n = 40;
    let cp = checkpoint_values(n);
    let (i1, i3) = (cp[1].floor() as usize, cp[3].floor() as usize);
    let mut t = sample_process(n, stream_rng(9, 0));
    let order = order_of(&mut t);
    let tri = [(0, 1), (1, 2), (2, 0)];
    let rest: Vec<(usize, usize)> = order.iter().copied().filter(|e| !tri.contains(e)).collect();
    let (early, late): (Vec<_>, Vec<_>) = rest.into_iter().partition(|&(u, v)| u != 0 && v != 0);
    let mut out: Vec<(usize, usize)> = early[..i1 + 5].to_vec();
    out.extend(tri);
    out.extend(&early[i1 + 5..]);
    out.extend(late);
    assert!(i1 + 8 < i3);
    ProcessTrace::from_order(n, out).unwrap()
}

#[test]
fn planted_triangle_breaks_short_cycle_property() {
    let mut t = planted_triangle();
    let cp = checkpoint_values(40);
    let k1 = t.prefix(cp[1].floor() as usize).unwrap();
    assert_eq!(k1.deg(0, Sign::Out, None) + k1.deg(0, Sign::In, None), 0);
    let rep = check_process_properties(&mut t, &[4]).unwrap();
    let r = &rep.results[0];
    assert!(!r.passed);
    // The witness is a cycle of the underlying graph of K₃ through a low vertex.
    let k3 = t.prefix(cp[3].floor() as usize).unwrap().underlying();
    let w = &r.witness;
    assert!(w.len() == 2 || w.len() == 3);
    if w.len() == 3 {
        assert!((0..3).all(|j| k3.has_edge(w[j], w[(j + 1) % 3])));
    }
    let low = |v: usize| k1.deg(v, Sign::Out, None) == 0 || k1.deg(v, Sign::In, None) == 0;
    assert!(low(w[0]));
}

#[test]
fn property_ids_are_checked() {
    let mut t = sample_process(40, stream_rng(0, 0));
    assert!(check_process_properties(&mut t, &[13]).unwrap_err().is_input());
    assert!(check_process_properties(&mut t, &[0]).unwrap_err().is_input());
}

#[test]
fn max_degree_holds_at_n2000() {
    let mut t = sample_process(2000, stream_rng(5, 0));
    let rep = check_process_properties(&mut t, &[9, 12]).unwrap();
    assert!(rep.results.iter().all(|r| r.passed), "{:?}", rep.results);
}
