//! Searching for small vertex sets with negative slack, exhaustively or greedily.

use crate::bitset::BitSet;
use crate::graph::UGraph;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

/// Every nonempty `U ⊆ allowed` with `|U| ≤ max_size`; returns the first with `slack(U) < 0`.
pub(crate) fn exact_refute(
    n: usize,
    allowed: &BitSet,
    max_size: usize,
    slack: impl Fn(&[usize]) -> f64,
) -> Option<Vec<usize>> {
    assert!(n <= 24);
    let allowed_mask = allowed.iter().fold(0u32, |m, v| m | 1 << v);
    let mut u = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        if mask & !allowed_mask != 0 || mask.count_ones() as usize > max_size {
            continue;
        }
        u.clear();
        u.extend((0..n).filter(|&v| mask >> v & 1 == 1));
        if slack(&u) < -1e-9 {
            return Some(u.clone());
        }
    }
    None
}

const GROWTH_STEPS: usize = 16;
const POOL: usize = 48;

/// One-sided search: all singletons, then greedy growth from `seeds` and random starts,
/// each step adding the nearby vertex that lowers the slack most.
pub(crate) fn sampled_refute<R: Rng>(
    g: &UGraph,
    allowed: &BitSet,
    max_size: usize,
    seeds: &[usize],
    trials: usize,
    rng: &mut R,
    slack: impl Fn(&[usize]) -> f64,
) -> Option<Vec<usize>> {
    if max_size == 0 {
        return None;
    }
    for v in allowed.iter() {
        if slack(&[v]) < -1e-9 {
            return Some(vec![v]);
        }
    }
    if max_size < 2 || allowed.count() < 2 {
        return None;
    }
    let all: Vec<usize> = allowed.iter().collect();
    let seeds: Vec<usize> = seeds.iter().copied().filter(|&s| allowed.contains(s)).collect();
    for t in 0..trials.max(seeds.len()) {
        let start = match seeds.get(t) {
            Some(&s) => s,
            None => *all.choose(rng).unwrap(),
        };
        let mut u = vec![start];
        let mut in_u = BitSet::from_iter(g.n(), [start]);
        for _ in 1..max_size.min(GROWTH_STEPS + 1) {
            let mut near = BitSet::new(g.n());
            for &x in &u {
                for y in g.adj(x).iter() {
                    near.insert(y);
                    near.union_with(g.adj(y));
                }
            }
            near.intersect_with(allowed);
            near.difference_with(&in_u);
            let mut pool: Vec<usize> = near.iter().choose_multiple(rng, POOL);
            pool.extend(all.iter().copied().filter(|v| !in_u.contains(*v)).choose_multiple(rng, 4));
            let mut best: Option<(usize, f64)> = None;
            for c in pool {
                u.push(c);
                let s = slack(&u);
                u.pop();
                if best.map_or(true, |(_, b)| s < b) {
                    best = Some((c, s));
                }
            }
            let Some((c, s)) = best else { break };
            u.push(c);
            in_u.insert(c);
            if s < -1e-9 {
                u.sort_unstable();
                return Some(u);
            }
        }
    }
    None
}
