//! Vertex-expansion checks: every `A` with `|A| ≤ φn` has `|N(A)| ≥ k|A|`, plus connectivity.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::UGraph;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

pub const EXACT_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckMode {
    Exact,
    Sampled { trials: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpanderVerdict {
    /// In sampled mode `true` only means "not refuted".
    pub holds: bool,
    pub mode: CheckMode,
    pub witness: Option<Vec<usize>>,
    pub connected: bool,
}

pub fn size_bound(n: usize, set_frac: f64) -> usize {
    (set_frac * n as f64 + 1e-9).floor().max(0.0) as usize
}

pub fn is_k_expander<R: Rng>(
    g: &UGraph,
    ratio: f64,
    set_frac: f64,
    mode: CheckMode,
    rng: &mut R,
) -> Result<ExpanderVerdict> {
    let comps = g.components();
    if comps.len() > 1 {
        let smallest = comps.into_iter().min_by_key(|c| c.len()).unwrap();
        return Ok(ExpanderVerdict {
            holds: false,
            mode,
            witness: Some(smallest),
            connected: false,
        });
    }
    let s = size_bound(g.n(), set_frac);
    let witness = match mode {
        CheckMode::Exact => {
            if g.n() > EXACT_CAP {
                return Err(Error::input(format!(
                    "exact expander check capped at n={EXACT_CAP}, got n={}",
                    g.n()
                )));
            }
            exact_witness(g, ratio, s)
        }
        CheckMode::Sampled { trials } => sampled_witness(g, ratio, s, trials, rng),
    };
    Ok(ExpanderVerdict {
        holds: witness.is_none(),
        mode,
        witness,
        connected: true,
    })
}

fn violates(size: usize, nb: usize, ratio: f64) -> bool {
    (nb as f64) < ratio * size as f64
}

fn exact_witness(g: &UGraph, ratio: f64, s: usize) -> Option<Vec<usize>> {
    let n = g.n();
    if s == 0 {
        return None;
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.adj(v).iter().fold(0u32, |m, w| m | (1 << w)))
        .collect();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > s {
            continue;
        }
        let mut nb = 0u32;
        let mut rest = mask;
        while rest != 0 {
            nb |= adj[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        nb &= !mask;
        if violates(size, nb.count_ones() as usize, ratio) {
            return Some((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    None
}

fn sampled_witness<R: Rng>(
    g: &UGraph,
    ratio: f64,
    s: usize,
    trials: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let n = g.n();
    if s == 0 || n == 0 {
        return None;
    }
    let verts: Vec<usize> = (0..n).collect();
    // Singletons are cheap and the most common violators.
    for v in 0..n {
        if violates(1, g.deg(v, None), ratio) {
            return Some(vec![v]);
        }
    }
    for t in 0..trials {
        let mut set = BitSet::new(n);
        if t % 2 == 0 {
            let size = rng.gen_range(1..=s);
            for &v in verts.choose_multiple(rng, size) {
                set.insert(v);
            }
            let nb = g.neighbourhood(&set);
            if violates(size, nb.count(), ratio) {
                return Some(set.to_vec());
            }
        } else {
            // Greedy growth: repeatedly absorb the frontier vertex adding fewest new neighbours.
            let seed = verts[rng.gen_range(0..n)];
            set.insert(seed);
            let mut nb = g.neighbourhood(&set);
            for size in 1..=s {
                if violates(size, nb.count(), ratio) {
                    return Some(set.to_vec());
                }
                if size == s {
                    break;
                }
                let mut best: Option<(usize, usize)> = None;
                for w in nb.iter() {
                    let mut fresh = g.adj(w).clone();
                    fresh.difference_with(&nb);
                    fresh.difference_with(&set);
                    let c = fresh.count();
                    if best.map_or(true, |(bc, _)| c < bc) {
                        best = Some((c, w));
                    }
                }
                let Some((_, w)) = best else { break };
                set.insert(w);
                nb = g.neighbourhood(&set);
            }
        }
    }
    None
}
