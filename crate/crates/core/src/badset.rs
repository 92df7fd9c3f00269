//! Extraction of the bad set `B` whose removal leaves every small set expanding into `V₀`.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::expander::CheckMode;
use crate::graph::UGraph;
use crate::params::PipelineParams;
use crate::refute::{exact_refute, sampled_refute};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BadSet {
    pub b: Vec<usize>,
    pub mode: CheckMode,
    /// Verification rounds that found a witness and enlarged `B`.
    pub augmentations: usize,
}

const RETRY_BUDGET: usize = 64;

/// `|N(U) ∩ (V₀ ∖ B)| − d|U|`.
pub fn bad_slack(g: &UGraph, target: &BitSet, d: f64, u: &[usize]) -> f64 {
    let mut nb = BitSet::new(g.n());
    for &x in u {
        nb.union_with(g.adj(x));
    }
    nb.intersection_count(target) as f64 - d * u.len() as f64
}

pub fn find_bad_set<R: Rng>(g: &UGraph, v0: &[usize], params: &PipelineParams, rng: &mut R) -> Result<BadSet> {
    let n = g.n();
    if n == 0 {
        return Err(Error::input("empty graph"));
    }
    if let Some(&v) = v0.iter().find(|&&v| v >= n) {
        return Err(Error::input(format!("vertex {v} out of range")));
    }
    let v0s = BitSet::from_iter(n, v0.iter().copied());
    let d = params.d_extend(n);
    let m = params.m_extend(n).floor().max(1.0) as usize;
    let cap = params.bad_set_cap(n);
    let mode = if n <= params.exact_cap.min(crate::expander::EXACT_CAP) {
        CheckMode::Exact
    } else {
        CheckMode::Sampled { trials: params.sampled_trials }
    };
    let mut b = BitSet::new(n);
    let mut augmentations = 0;
    loop {
        peel(g, &v0s, &mut b, 2.0 * d);
        if b.count() > cap {
            return Err(Error::BadSet(format!("bad set grew to {} above cap {cap}", b.count())));
        }
        let mut target = v0s.clone();
        target.difference_with(&b);
        let mut allowed = BitSet::full(n);
        allowed.difference_with(&b);
        let slack = |u: &[usize]| bad_slack(g, &target, d, u);
        let witness = match mode {
            CheckMode::Exact => exact_refute(n, &allowed, 2 * m, slack),
            CheckMode::Sampled { trials } => {
                let mut seeds: Vec<usize> = allowed.iter().collect();
                seeds.sort_by_key(|&v| (g.adj(v).intersection_count(&target), v));
                seeds.truncate(trials);
                sampled_refute(g, &allowed, 2 * m, &seeds, trials, rng, slack)
            }
        };
        match witness {
            None => break,
            Some(u) => {
                augmentations += 1;
                if augmentations > RETRY_BUDGET {
                    return Err(Error::BadSet(format!("verification still refuted after {RETRY_BUDGET} rounds; witness {u:?}")));
                }
                for v in u {
                    b.insert(v);
                }
            }
        }
    }
    if b.is_empty() {
        let v = (0..n).min_by_key(|&v| (g.adj(v).intersection_count(&v0s), v)).unwrap();
        b.insert(v);
    }
    Ok(BadSet { b: b.to_vec(), mode, augmentations })
}

/// Repeatedly moves into `b` any vertex with fewer than `threshold` neighbours in `V₀ ∖ b`.
fn peel(g: &UGraph, v0: &BitSet, b: &mut BitSet, threshold: f64) {
    loop {
        let mut target = v0.clone();
        target.difference_with(b);
        let low: Vec<usize> = (0..g.n())
            .filter(|&v| !b.contains(v) && (g.adj(v).intersection_count(&target) as f64) < threshold)
            .collect();
        if low.is_empty() {
            return;
        }
        for v in low {
            b.insert(v);
        }
    }
}

/// Re-checks the guarantee for a given `B` (exact for small n).
pub fn verify_bad_set<R: Rng>(g: &UGraph, v0: &[usize], b: &[usize], params: &PipelineParams, rng: &mut R) -> Option<Vec<usize>> {
    let n = g.n();
    let d = params.d_extend(n);
    let m = params.m_extend(n).floor().max(1.0) as usize;
    let bs = BitSet::from_iter(n, b.iter().copied());
    let mut target = BitSet::from_iter(n, v0.iter().copied());
    target.difference_with(&bs);
    let mut allowed = BitSet::full(n);
    allowed.difference_with(&bs);
    let slack = |u: &[usize]| bad_slack(g, &target, d, u);
    if n <= crate::expander::EXACT_CAP {
        exact_refute(n, &allowed, 2 * m, slack)
    } else {
        sampled_refute(g, &allowed, 2 * m, &[], params.sampled_trials, rng, slack)
    }
}
