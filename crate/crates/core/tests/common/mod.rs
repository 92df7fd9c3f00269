//! Slow, obviously-correct reference implementations shared by the integration tests.
#![allow(dead_code)]

use oriented_cycles::cover::CoverInstance;
use oriented_cycles::graph::Digraph;
use oriented_cycles::pattern::OrientationPattern;
use oriented_cycles::process::{sample_process, ProcessTrace};
use oriented_cycles::rng::stream_rng;

fn fits(d: &Digraph, c: &OrientationPattern, map: &[usize]) -> bool {
    let n = map.len();
    (0..n).all(|k| {
        let (a, b) = (map[k], map[(k + 1) % n]);
        if c.forward(k) { d.has_edge(a, b) } else { d.has_edge(b, a) }
    })
}

/// Tries every permutation of the vertex set as a position→vertex map.
pub fn brute_embedding(d: &Digraph, c: &OrientationPattern, pins: &[(usize, usize)]) -> Option<Vec<usize>> {
    let n = c.len();
    let mut map: Vec<usize> = (0..n).collect();
    let mut found = None;
    permute(&mut map, 0, &mut |m| {
        if pins.iter().all(|&(p, v)| m[p] == v) && fits(d, c, m) {
            found = Some(m.to_vec());
            true
        } else {
            false
        }
    });
    found
}

fn permute(a: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == a.len() {
        return f(a);
    }
    for j in k..a.len() {
        a.swap(k, j);
        if permute(a, k + 1, f) {
            a.swap(k, j);
            return true;
        }
        a.swap(k, j);
    }
    false
}

/// `(out, in)` degree of every vertex after the first `i` edges.
pub fn degrees(n: usize, order: &[(usize, usize)], i: usize) -> Vec<(usize, usize)> {
    let mut deg = vec![(0, 0); n];
    for &(u, v) in &order[..i] {
        deg[u].0 += 1;
        deg[v].1 += 1;
    }
    deg
}

/// Hitting times recomputed from scratch at every prefix.
pub fn naive_hitting(n: usize, order: &[(usize, usize)]) -> (Option<usize>, Option<usize>, Vec<usize>, Vec<usize>) {
    let mut m0 = None;
    let mut m1 = None;
    let mut s = Vec::new();
    let mut t = Vec::new();
    for i in 0..=order.len() {
        let deg = degrees(n, order, i);
        if m0.is_none() && deg.iter().all(|&(o, d)| o + d >= 2) {
            m0 = Some(i);
        }
        let zeros = deg.iter().filter(|&&(o, d)| o == 0 || d == 0).count();
        if zeros > 0 {
            m1 = Some(i);
        }
        s.push(zeros);
        t.push(deg.iter().filter(|&&(o, d)| o == 1 && d == 1).count());
    }
    (m0, m1, s, t)
}

/// 40 vertices: X = {0}; B⁺ = {1, 2, 3}; B⁻ = {5, 6}; A⁺ = 16..28; A⁻ = 28..40.
/// 1, 2, 5 reach degree 2 into A directly; 3 and 6 only through 1, 2 and 5.
pub fn two_level() -> Digraph {
    let mut d = Digraph::new(40);
    let out = [(0, [25, 26]), (1, [16, 17]), (2, [18, 19]), (3, [1, 24]), (5, [20, 21]), (6, [2, 22])];
    let inn = [(0, [37, 38]), (1, [28, 29]), (2, [30, 31]), (3, [34, 35]), (5, [32, 33]), (6, [5, 36])];
    for (v, ws) in out {
        for w in ws {
            d.add_edge(v, w);
        }
    }
    for (v, ws) in inn {
        for w in ws {
            d.add_edge(w, v);
        }
    }
    d
}

pub fn two_level_instance<'a>(d: &'a Digraph, c: &'a OrientationPattern) -> CoverInstance<'a> {
    CoverInstance {
        d,
        pattern: c,
        x: vec![0],
        b_plus: vec![1, 2, 3],
        b_minus: vec![5, 6],
        a_plus: (16..28).collect(),
        a_minus: (28..40).collect(),
        centers: vec![(0, 2), (1, 7), (2, 12), (3, 17), (5, 22), (6, 27)],
        half_len: 2,
        degree: 2.0,
        level_budget: 8,
    }
}

/// Moves all but `keep` edges at each vertex of `low` to the end of a sampled order.
pub fn planted(n: usize, seed: u64, low: &[usize], keep: usize) -> ProcessTrace {
    let mut t = sample_process(n, stream_rng(seed, 1));
    let total = t.total();
    t.ensure(total).unwrap();
    let mut kept = vec![0usize; n];
    let mut head = Vec::new();
    let mut tail = Vec::new();
    for &(u, v) in t.materialized() {
        let (u, v) = (u as usize, v as usize);
        match low.iter().find(|&&x| x == u || x == v) {
            Some(&x) if kept[x] >= keep || low.contains(&u) && low.contains(&v) => tail.push((u, v)),
            Some(&x) => {
                kept[x] += 1;
                head.push((u, v))
            }
            None => head.push((u, v)),
        }
    }
    head.extend(tail);
    ProcessTrace::from_order(n, head).unwrap()
}
