//! The decoupling chain interpolating between D*(n,p) and D(n,p).
//!
//! Pairs `e_1 … e_ℓ` are the unordered pairs `x < y` in lexicographic order. In `D̂_j`
//! pairs with index `≤ j` use the independent bits `(X_i, Y_i)` for `xy` and `yx`,
//! the rest use `Z_i` for both directions at once.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::models::unordered_pairs;
use crate::rng::trial_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingRandomness {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    /// `(X_i, Y_i, Z_i)` per pair.
    pub triples: Vec<(bool, bool, bool)>,
}

impl CouplingRandomness {
    pub fn sample<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("probability {p} outside [0,1]")));
        }
        let pairs = unordered_pairs(n);
        let triples = pairs
            .iter()
            .map(|_| (rng.gen_bool(p), rng.gen_bool(p), rng.gen_bool(p)))
            .collect();
        Ok(CouplingRandomness { n, pairs, triples })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn coupling_chain(r: &CouplingRandomness, j: usize) -> Result<Digraph> {
    if j > r.len() {
        return Err(Error::input(format!("chain index {j} beyond ℓ={}", r.len())));
    }
    let mut d = Digraph::new(r.n);
    for (i, (&(x, y), &(bx, by, bz))) in r.pairs.iter().zip(&r.triples).enumerate() {
        if i < j {
            if bx {
                d.add_edge(x, y);
            }
            if by {
                d.add_edge(y, x);
            }
        } else if bz {
            d.add_edge(x, y);
            d.add_edge(y, x);
        }
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MonotoneReport {
    pub trials: usize,
    pub freq_j0: f64,
    pub freq_jl: f64,
    pub difference: f64,
    /// One-sided lower confidence bound (≈ 99%) on `freq_jl − freq_j0` from paired trials.
    pub lower_bound: f64,
}

/// Empirical containment frequency of `D0 ∪ D̂_0` versus `D0 ∪ D̂_ℓ` on shared randomness.
pub fn monotone_family_check<F>(
    d0: &Digraph,
    family: F,
    p: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<MonotoneReport>
where
    F: Fn(&Digraph) -> bool + Sync,
{
    if d0.n() != n {
        return Err(Error::input("D0 must live on n vertices"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("probability {p} outside [0,1]")));
    }
    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64, 0);
            let r = CouplingRandomness::sample(n, p, &mut rng).expect("p checked");
            let a = family(&d0.union(&coupling_chain(&r, 0).unwrap()));
            let b = family(&d0.union(&coupling_chain(&r, r.len()).unwrap()));
            (a, b)
        })
        .collect::<Vec<_>>();
    let tf = trials.max(1) as f64;
    let f0 = outcomes.iter().filter(|o| o.0).count() as f64 / tf;
    let fl = outcomes.iter().filter(|o| o.1).count() as f64 / tf;
    let diffs: Vec<f64> = outcomes
        .iter()
        .map(|&(a, b)| b as u8 as f64 - a as u8 as f64)
        .collect();
    let mean = fl - f0;
    let var = if trials > 1 {
        diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (tf - 1.0)
    } else {
        0.0
    };
    Ok(MonotoneReport {
        trials,
        freq_j0: f0,
        freq_jl: fl,
        difference: mean,
        lower_bound: mean - 2.326 * (var / tf).sqrt(),
    })
}

/// Exact `P(family holds for D0 ∪ D̂_j)` by enumerating every outcome of the chain.
pub fn exact_chain_probability<F>(d0: &Digraph, p: f64, j: usize, family: F) -> Result<f64>
where
    F: Fn(&Digraph) -> bool,
{
    let n = d0.n();
    let pairs = unordered_pairs(n);
    let l = pairs.len();
    if j > l {
        return Err(Error::input(format!("chain index {j} beyond ℓ={l}")));
    }
    if 2 * j + (l - j) > 24 {
        return Err(Error::input("exact chain enumeration too large"));
    }
    let q = 1.0 - p;
    // decoupled pairs carry two bits, coupled pairs one
    let bits = 2 * j + (l - j);
    let mut total = 0.0;
    for mask in 0u64..(1u64 << bits) {
        let mut d = d0.clone();
        let mut w = 1.0;
        let mut b = 0;
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if i < j {
                for (from, to) in [(x, y), (y, x)] {
                    if mask >> b & 1 == 1 {
                        d.add_edge(from, to);
                        w *= p;
                    } else {
                        w *= q;
                    }
                    b += 1;
                }
            } else {
                if mask >> b & 1 == 1 {
                    d.add_edge(x, y);
                    d.add_edge(y, x);
                    w *= p;
                } else {
                    w *= q;
                }
                b += 1;
            }
        }
        if w > 0.0 && family(&d) {
            total += w;
        }
    }
    Ok(total)
}
