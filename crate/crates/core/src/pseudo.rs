//! Pseudorandomness checks (A1–A3) and the three-way partition of `V ∖ X`.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::expander::CheckMode;
use crate::graph::{Digraph, Sign};
use crate::params::PipelineParams;
use crate::rng::{stream_rng, StreamRng};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Witness {
    Vertex { v: usize, sign: Sign, degree: usize },
    Sets { sign: Sign, a: Vec<usize>, b: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl CheckOutcome {
    fn pass() -> Self {
        CheckOutcome { passed: true, witness: None }
    }
    fn fail(w: Witness) -> Self {
        CheckOutcome { passed: false, witness: Some(w) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoReport {
    pub a1: CheckOutcome,
    pub a2: CheckOutcome,
    pub a3: CheckOutcome,
    pub a3_mode: CheckMode,
}

impl PseudoReport {
    pub fn passed(&self) -> bool {
        self.a1.passed && self.a2.passed && self.a3.passed
    }

    /// Re-derives each failure from its witness alone.
    pub fn witnesses_valid(&self, d: &Digraph, x: &BitSet, params: &PipelineParams) -> bool {
        let n = d.n();
        let outside = complement(x, n);
        let ok1 = match &self.a1.witness {
            None => self.a1.passed,
            Some(Witness::Vertex { v, sign, .. }) => {
                d.deg(*v, *sign, None) as f64 > params.a1_max_degree(n)
            }
            _ => false,
        };
        let ok2 = match &self.a2.witness {
            None => self.a2.passed,
            Some(Witness::Vertex { v, sign, .. }) => {
                (d.deg(*v, *sign, Some(&outside)) as f64) < params.a2_min_degree(n)
            }
            _ => false,
        };
        let ok3 = match &self.a3.witness {
            None => self.a3.passed,
            Some(Witness::Sets { sign, a, b }) => a3_violated(d, *sign, a, b, params),
            _ => false,
        };
        ok1 && ok2 && ok3
    }
}

fn complement(x: &BitSet, n: usize) -> BitSet {
    let mut s = BitSet::full(n);
    s.difference_with(x);
    s
}

/// `true` when `(A, B)` breaks A3: A small and nonempty, every `v ∈ A` has
/// `d^⋄(v, B) ≥ (ln n)^{2/3}`, yet `|B| < |A| (ln n)^{1/3}`.
pub fn a3_violated(d: &Digraph, sign: Sign, a: &[usize], b: &[usize], params: &PipelineParams) -> bool {
    let n = d.n();
    if a.is_empty() || a.len() > params.a3_max_set(n) {
        return false;
    }
    let bs = BitSet::from_iter(n, b.iter().copied());
    let t = params.a3_degree(n);
    a.iter().all(|&v| d.deg(v, sign, Some(&bs)) as f64 >= t)
        && (bs.count() as f64) < a.len() as f64 * params.a3_expansion(n)
}

pub fn check_pseudorandom(d: &Digraph, x: &[usize], params: &PipelineParams) -> Result<PseudoReport> {
    let mut rng = stream_rng(0x5eed_a3 ^ d.n() as u64, d.m() as u64);
    check_pseudorandom_with(d, x, params, &mut rng)
}

pub fn check_pseudorandom_with<R: Rng>(
    d: &Digraph,
    x: &[usize],
    params: &PipelineParams,
    rng: &mut R,
) -> Result<PseudoReport> {
    let n = d.n();
    if let Some(&v) = x.iter().find(|&&v| v >= n) {
        return Err(Error::input(format!("exceptional vertex {v} out of range")));
    }
    let xs = BitSet::from_iter(n, x.iter().copied());
    let outside = complement(&xs, n);

    let max1 = params.a1_max_degree(n);
    let mut a1 = CheckOutcome::pass();
    let mut worst: Option<(usize, Sign, usize)> = None;
    for v in 0..n {
        for sign in Sign::BOTH {
            let dv = d.deg(v, sign, None);
            if dv as f64 > max1 && worst.map_or(true, |w| dv > w.2) {
                worst = Some((v, sign, dv));
            }
        }
    }
    if let Some((v, sign, degree)) = worst {
        a1 = CheckOutcome::fail(Witness::Vertex { v, sign, degree });
    }

    let min2 = params.a2_min_degree(n);
    let mut a2 = CheckOutcome::pass();
    let mut worst: Option<(usize, Sign, usize)> = None;
    for v in 0..n {
        for sign in Sign::BOTH {
            let dv = d.deg(v, sign, Some(&outside));
            if (dv as f64) < min2 && worst.map_or(true, |w| dv < w.2) {
                worst = Some((v, sign, dv));
            }
        }
    }
    if let Some((v, sign, degree)) = worst {
        a2 = CheckOutcome::fail(Witness::Vertex { v, sign, degree });
    }

    let (a3_mode, found) = if n <= params.exact_cap {
        (CheckMode::Exact, a3_exact(d, params))
    } else {
        let trials = params.sampled_trials;
        (CheckMode::Sampled { trials }, a3_sampled(d, params, trials, rng))
    };
    let a3 = match found {
        Some((sign, a, b)) => CheckOutcome::fail(Witness::Sets { sign, a, b }),
        None => CheckOutcome::pass(),
    };
    Ok(PseudoReport { a1, a2, a3, a3_mode })
}

fn a3_exact(d: &Digraph, params: &PipelineParams) -> Option<(Sign, Vec<usize>, Vec<usize>)> {
    let n = d.n();
    let cap = params.a3_max_set(n);
    if cap == 0 {
        return None;
    }
    let t = params.a3_degree(n);
    let r = params.a3_expansion(n);
    let masks: Vec<[u32; 2]> = (0..n)
        .map(|v| {
            let m = |s: Sign| d.adj(v, s).iter().fold(0u32, |acc, u| acc | 1 << u);
            [m(Sign::Out), m(Sign::In)]
        })
        .collect();
    for b in 0u32..(1u32 << n) {
        let size = b.count_ones() as f64;
        for (si, sign) in Sign::BOTH.into_iter().enumerate() {
            let heavy: Vec<usize> = (0..n)
                .filter(|&v| (masks[v][si] & b).count_ones() as f64 >= t)
                .take(cap)
                .collect();
            if !heavy.is_empty() && size < heavy.len() as f64 * r {
                let bv = (0..n).filter(|&u| b >> u & 1 == 1).collect();
                return Some((sign, heavy, bv));
            }
        }
    }
    None
}

/// Greedy refutation: grow `A` one vertex at a time, buying just enough new `B` vertices
/// to keep every member heavy, and report the first time `B` is too small.
fn a3_sampled<R: Rng>(
    d: &Digraph,
    params: &PipelineParams,
    trials: usize,
    rng: &mut R,
) -> Option<(Sign, Vec<usize>, Vec<usize>)> {
    let n = d.n();
    let cap = params.a3_max_set(n);
    if cap == 0 {
        return None;
    }
    let t = params.a3_degree(n);
    let need = t.ceil().max(0.0) as usize;
    let r = params.a3_expansion(n);
    let max_steps = cap.min(64);
    for trial in 0..trials {
        let sign = Sign::BOTH[trial % 2];
        let eligible: Vec<usize> = (0..n).filter(|&v| d.deg(v, sign, None) >= need).collect();
        if eligible.is_empty() {
            continue;
        }
        // Even trials seed at low-degree vertices, odd ones at random.
        let seed = if trial / 2 < eligible.len() && trial % 4 < 2 {
            let mut sorted = eligible.clone();
            sorted.sort_by_key(|&v| (d.deg(v, sign, None), v));
            sorted[(trial / 4) % sorted.len()]
        } else {
            *eligible.choose(rng).unwrap()
        };
        let mut a = vec![seed];
        let mut in_a = BitSet::from_iter(n, [seed]);
        let mut b = BitSet::new(n);
        buy(d, sign, seed, need, &mut b, rng);
        loop {
            if (b.count() as f64) < a.len() as f64 * r {
                return Some((sign, a, b.to_vec()));
            }
            if a.len() >= max_steps {
                break;
            }
            let mut best: Option<(usize, usize)> = None;
            for &u in &eligible {
                if in_a.contains(u) {
                    continue;
                }
                let ov = d.adj(u, sign).intersection_count(&b);
                if best.map_or(true, |(_, o)| ov > o) {
                    best = Some((u, ov));
                }
            }
            let Some((u, _)) = best else { break };
            a.push(u);
            in_a.insert(u);
            buy(d, sign, u, need, &mut b, rng);
        }
    }
    None
}

/// Adds neighbours of `u` to `b` until `d^⋄(u, b) ≥ need`, preferring popular ones.
fn buy<R: Rng>(d: &Digraph, sign: Sign, u: usize, need: usize, b: &mut BitSet, rng: &mut R) {
    let have = d.adj(u, sign).intersection_count(b);
    if have >= need {
        return;
    }
    let mut fresh: Vec<usize> = d.adj(u, sign).iter().filter(|&w| !b.contains(w)).collect();
    fresh.shuffle(rng);
    fresh.sort_by_key(|&w| std::cmp::Reverse(d.deg(w, sign.flip(), None)));
    for w in fresh.into_iter().take(need - have) {
        b.insert(w);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    pub v0: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub iterations: usize,
}

impl Partition {
    /// Lists every vertex whose degree into `V₁` or `V₂` falls below `threshold`.
    pub fn violations(&self, d: &Digraph, threshold: f64) -> Vec<usize> {
        let n = d.n();
        let s1 = BitSet::from_iter(n, self.v1.iter().copied());
        let s2 = BitSet::from_iter(n, self.v2.iter().copied());
        (0..n)
            .filter(|&v| {
                Sign::BOTH.into_iter().any(|s| {
                    (d.deg(v, s, Some(&s1)) as f64) < threshold
                        || (d.deg(v, s, Some(&s2)) as f64) < threshold
                })
            })
            .collect()
    }
}

const X_PART: u8 = 3;

struct Resampler<'a> {
    d: &'a Digraph,
    part: Vec<u8>,
    /// `cnt[v][sign][i-1]` = degree of v into part i, for i ∈ {1, 2}.
    cnt: Vec<[[usize; 2]; 2]>,
    need: usize,
    p: f64,
}

impl<'a> Resampler<'a> {
    fn violated(&self, v: usize) -> bool {
        self.cnt[v].iter().any(|s| s.iter().any(|&c| c < self.need))
    }

    fn set(&mut self, w: usize, to: u8) {
        let from = self.part[w];
        if from == to {
            return;
        }
        self.part[w] = to;
        for (si, sign) in Sign::BOTH.into_iter().enumerate() {
            // u with w ∈ N^sign(u) is in N^{-sign}(w).
            for u in self.d.adj(w, sign.flip()).iter() {
                if (1..=2).contains(&from) {
                    self.cnt[u][si][from as usize - 1] -= 1;
                }
                if (1..=2).contains(&to) {
                    self.cnt[u][si][to as usize - 1] += 1;
                }
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> u8 {
        let r: f64 = rng.gen();
        if r < self.p {
            1
        } else if r < 2.0 * self.p {
            2
        } else {
            0
        }
    }
}

/// Moser–Tardos resampling for the partition, followed by rebalancing to `⌊n/4⌋`.
pub fn partition_exceptional(
    d: &Digraph,
    x: &[usize],
    params: &PipelineParams,
    rng: &mut StreamRng,
) -> Result<Partition> {
    let n = d.n();
    let xs = BitSet::from_iter(n, x.iter().copied());
    if x.iter().any(|&v| v >= n) {
        return Err(Error::input("exceptional vertex out of range"));
    }
    let quarter = n / 4;
    if n - xs.count() < 2 * quarter {
        return Err(Error::input("exceptional set leaves too few vertices to partition"));
    }
    let need = params.partition_threshold(n).ceil() as usize;
    let outside = complement(&xs, n);
    for v in 0..n {
        for s in Sign::BOTH {
            if d.deg(v, s, Some(&outside)) < 2 * need {
                return Err(Error::PartitionFailure { iterations: 0, worst_vertex: v });
            }
        }
    }
    let mut rs = Resampler {
        d,
        part: vec![0; n],
        cnt: vec![[[0; 2]; 2]; n],
        need,
        p: params.partition_p,
    };
    for v in x {
        rs.part[*v] = X_PART;
    }
    let free: Vec<usize> = outside.iter().collect();
    for &w in &free {
        let to = rs.draw(rng);
        rs.set(w, to);
    }
    let budget = params.resample_budget(n);
    let mut hits = vec![0usize; n];
    let mut iterations = 0;
    loop {
        let bad: BTreeSet<usize> = (0..n).filter(|&v| rs.violated(v)).collect();
        let mut bad = bad;
        while let Some(v) = bad.pop_first() {
            if !rs.violated(v) {
                continue;
            }
            if iterations >= budget {
                let worst = (0..n)
                    .filter(|&u| rs.violated(u))
                    .max_by_key(|&u| (hits[u], std::cmp::Reverse(u)))
                    .unwrap_or(v);
                return Err(Error::PartitionFailure { iterations, worst_vertex: worst });
            }
            iterations += 1;
            hits[v] += 1;
            let mut scope = d.out_adj(v).clone();
            scope.union_with(d.in_adj(v));
            scope.difference_with(&xs);
            let changed: Vec<usize> = scope.iter().collect();
            for &w in &changed {
                let to = rs.draw(rng);
                rs.set(w, to);
            }
            for &w in &changed {
                for s in Sign::BOTH {
                    for u in d.adj(w, s).iter() {
                        if rs.violated(u) {
                            bad.insert(u);
                        }
                    }
                }
            }
        }
        let size = |k: u8| free.iter().filter(|&&w| rs.part[w] == k).count();
        if size(1) <= quarter && size(2) <= quarter {
            break;
        }
        if iterations >= budget {
            return Err(Error::PartitionFailure { iterations, worst_vertex: free[0] });
        }
        iterations += 1;
        for &w in &free {
            let to = rs.draw(rng);
            rs.set(w, to);
        }
    }
    let mut pool: Vec<usize> = free.iter().copied().filter(|&w| rs.part[w] == 0).collect();
    pool.shuffle(rng);
    for k in 1..=2u8 {
        let mut have = free.iter().filter(|&&w| rs.part[w] == k).count();
        while have < quarter {
            let w = pool.pop().expect("size check above guarantees enough vertices");
            rs.set(w, k);
            have += 1;
        }
    }
    let collect = |k: u8| free.iter().copied().filter(|&w| rs.part[w] == k).collect::<Vec<_>>();
    Ok(Partition { v0: collect(0), v1: collect(1), v2: collect(2), iterations })
}
