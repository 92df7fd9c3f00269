//! (d,m)-extendable subgraphs and exact-length path connection through fresh vertices.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::expander::{is_k_expander, CheckMode, ExpanderVerdict};
use crate::graph::UGraph;
use crate::params::PipelineParams;
use crate::refute::{exact_refute, sampled_refute};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::collections::VecDeque;

/// A subgraph given by its vertex set and edge list.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph {
    pub vertices: BitSet,
    pub deg: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn empty(n: usize) -> Self {
        Subgraph { vertices: BitSet::new(n), deg: vec![0; n], edges: Vec::new() }
    }

    pub fn edgeless<I: IntoIterator<Item = usize>>(n: usize, verts: I) -> Self {
        let mut s = Self::empty(n);
        for v in verts {
            s.vertices.insert(v);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.deg.len()
    }

    pub fn add_path(&mut self, path: &[usize]) {
        for &v in path {
            self.vertices.insert(v);
        }
        for w in path.windows(2) {
            self.edges.push((w[0], w[1]));
            self.deg[w[0]] += 1;
            self.deg[w[1]] += 1;
        }
    }

    pub fn max_degree(&self) -> usize {
        self.deg.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendVerdict {
    pub holds: bool,
    pub mode: CheckMode,
    pub witness: Option<Vec<usize>>,
}

/// `|N'(U) ∖ V(S)| − (d−1)|U| + Σ_{x∈U∩V(S)} (d_S(x) − 1)`.
pub fn extend_slack(g: &UGraph, s: &Subgraph, d: f64, u: &[usize]) -> f64 {
    let mut nb = BitSet::new(g.n());
    for &x in u {
        nb.union_with(g.adj(x));
    }
    nb.difference_with(&s.vertices);
    let bonus: f64 = u
        .iter()
        .filter(|&&x| s.vertices.contains(x))
        .map(|&x| s.deg[x] as f64 - 1.0)
        .sum();
    nb.count() as f64 - (d - 1.0) * u.len() as f64 + bonus
}

pub fn check_extendable<R: Rng>(
    g: &UGraph,
    s: &Subgraph,
    d: f64,
    m: usize,
    mode: CheckMode,
    seeds: &[usize],
    rng: &mut R,
) -> Result<ExtendVerdict> {
    if s.n() != g.n() {
        return Err(Error::input("subgraph and graph sizes differ"));
    }
    if s.max_degree() as f64 > d {
        return Err(Error::input(format!(
            "subgraph has maximum degree {} above d = {d}",
            s.max_degree()
        )));
    }
    let all = BitSet::full(g.n());
    let slack = |u: &[usize]| extend_slack(g, s, d, u);
    let witness = match mode {
        CheckMode::Exact => {
            if g.n() > crate::expander::EXACT_CAP {
                return Err(Error::input("exact extendability check needs n ≤ 20"));
            }
            exact_refute(g.n(), &all, 2 * m, slack)
        }
        CheckMode::Sampled { trials } => sampled_refute(g, &all, 2 * m, seeds, trials, rng, slack),
    };
    Ok(ExtendVerdict { holds: witness.is_none(), mode, witness })
}

#[derive(Clone, Debug)]
pub struct ExtendOptions {
    pub attempts: usize,
    pub node_budget: usize,
    pub exact_cap: usize,
    pub sampled_trials: usize,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { attempts: 50, node_budget: 200_000, exact_cap: 20, sampled_trials: 40 }
    }
}

impl ExtendOptions {
    pub fn from_params(p: &PipelineParams) -> Self {
        ExtendOptions {
            attempts: p.extend_attempts,
            exact_cap: p.exact_cap,
            sampled_trials: p.sampled_trials,
            ..Self::default()
        }
    }

    fn mode(&self, n: usize) -> CheckMode {
        if n <= self.exact_cap.min(crate::expander::EXACT_CAP) {
            CheckMode::Exact
        } else {
            CheckMode::Sampled { trials: self.sampled_trials }
        }
    }
}

/// Minimum admissible path length `2⌈log(2m)/log(d−1)⌉ + 1`.
pub fn min_path_len(d: f64, m: usize) -> usize {
    let k = ((2.0 * m as f64).ln() / (d - 1.0).ln() - 1e-9).ceil().max(0.0) as usize;
    2 * k + 1
}

fn conn_err(stage: &str, detail: String) -> Error {
    Error::Connection { pair: 0, stage: stage.into(), detail }
}

/// Finds an `a,b`-path of length exactly `len` with fresh interior such that `S + P`
/// stays extendable; returns the vertex sequence `a … b`.
#[allow(clippy::too_many_arguments)]
pub fn extend_path<R: Rng>(
    g: &UGraph,
    s: &Subgraph,
    a: usize,
    b: usize,
    len: usize,
    d: f64,
    m: usize,
    opts: &ExtendOptions,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = g.n();
    if d < 3.0 || m < 1 {
        return Err(Error::input("need d ≥ 3 and m ≥ 1"));
    }
    if a == b || a >= n || b >= n || !s.vertices.contains(a) || !s.vertices.contains(b) {
        return Err(Error::input("endpoints must be distinct vertices of S"));
    }
    if s.deg[a] as f64 > d / 2.0 || s.deg[b] as f64 > d / 2.0 {
        return Err(Error::input("endpoint degree in S exceeds d/2"));
    }
    let min_len = min_path_len(d, m);
    if len < min_len {
        return Err(Error::input(format!("length {len} below the minimum {min_len}")));
    }
    if s.max_degree() as f64 > d {
        return Err(Error::input("S has maximum degree above d"));
    }
    let mut fresh = BitSet::full(n);
    fresh.difference_with(&s.vertices);
    if !g.adj(a).intersects(&fresh) || !g.adj(b).intersects(&fresh) {
        return Err(conn_err("grow", "an endpoint has no fresh neighbour".into()));
    }
    // Distance to b through fresh vertices.
    let mut dist = vec![usize::MAX; n];
    dist[b] = 0;
    let mut q = VecDeque::from([b]);
    while let Some(v) = q.pop_front() {
        for w in g.adj(v).iter() {
            if fresh.contains(w) && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    let reach = g.adj(a).iter().filter(|&w| fresh.contains(w)).map(|w| dist[w]).min();
    match reach {
        Some(r) if r != usize::MAX && r + 1 <= len => {}
        _ => return Err(conn_err("join", format!("no fresh route of length ≤ {len}"))),
    }
    let fresh_deg: Vec<usize> = (0..n).map(|v| g.adj(v).intersection_count(&fresh)).collect();
    let mode = opts.mode(n);
    let mut found_any = false;
    let mut last_witness = None;
    for attempt in 0..opts.attempts.max(1) {
        let Some(path) = dfs_path(g, &fresh, &dist, &fresh_deg, a, b, len, attempt > 0, opts.node_budget, rng)
        else {
            continue;
        };
        found_any = true;
        let mut s2 = s.clone();
        s2.add_path(&path);
        let mut seeds: Vec<usize> = path.clone();
        for &v in &path {
            seeds.extend(g.adj(v).iter().take(4));
        }
        let verdict = check_extendable(g, &s2, d, m, mode, &seeds, rng)?;
        if verdict.holds {
            return Ok(path);
        }
        last_witness = verdict.witness;
    }
    if found_any {
        Err(conn_err("extendability", format!("every candidate path broke extendability; last witness {last_witness:?}")))
    } else {
        Err(conn_err("pad", format!("no fresh path of exact length {len} within budget")))
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs_path<R: Rng>(
    g: &UGraph,
    fresh: &BitSet,
    dist: &[usize],
    fresh_deg: &[usize],
    a: usize,
    b: usize,
    len: usize,
    randomize: bool,
    budget: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let n = g.n();
    let mut used = BitSet::new(n);
    let mut path = vec![a];
    let mut stack: Vec<Vec<usize>> = Vec::new();
    let order = |v: usize, remaining: usize, used: &BitSet, rng: &mut R| -> Vec<usize> {
        if remaining == 1 {
            return if g.has_edge(v, b) { vec![b] } else { vec![] };
        }
        let mut c: Vec<usize> = g
            .adj(v)
            .iter()
            .filter(|&w| fresh.contains(w) && !used.contains(w) && dist[w] < remaining)
            .collect();
        c.shuffle(rng);
        if !randomize {
            c.sort_by_key(|&w| std::cmp::Reverse(fresh_deg[w]));
        }
        c.reverse();
        c
    };
    stack.push(order(a, len, &used, rng));
    let mut nodes = 0;
    while let Some(top) = stack.last_mut() {
        nodes += 1;
        if nodes > budget {
            return None;
        }
        match top.pop() {
            None => {
                stack.pop();
                let v = path.pop().unwrap();
                used.remove(v);
            }
            Some(w) => {
                path.push(w);
                if w == b {
                    return Some(path);
                }
                used.insert(w);
                let remaining = len + 1 - path.len();
                stack.push(order(w, remaining, &used, rng));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Connection {
    pub paths: Vec<Vec<usize>>,
    /// `V₀ ∖ (B ∪ interiors)`.
    pub residual: Vec<usize>,
    pub residual_expander: ExpanderVerdict,
}

/// Connects each `(xᵢ, yᵢ)` by a path of length `ℓᵢ` with interior in `V₀ ∖ B`,
/// keeping the union extendable in `G − B`.
pub fn connect_pairs<R: Rng>(
    g: &UGraph,
    v0: &[usize],
    b: &[usize],
    pairs: &[(usize, usize)],
    lengths: &[usize],
    params: &PipelineParams,
    rng: &mut R,
) -> Result<Connection> {
    let n = g.n();
    if pairs.len() != lengths.len() {
        return Err(Error::input("pairs and lengths differ in count"));
    }
    let v0s = BitSet::from_iter(n, v0.iter().copied());
    let bs = BitSet::from_iter(n, b.iter().copied());
    let total: usize = lengths.iter().sum();
    if total as f64 > n as f64 / 8.0 {
        return Err(Error::input(format!("total length {total} exceeds n/8")));
    }
    let min_len = params.min_connect_len(n);
    if let Some(l) = lengths.iter().find(|&&l| l < min_len) {
        return Err(Error::input(format!("length {l} below minimum {min_len}")));
    }
    let mut ends = BitSet::new(n);
    for &(x, y) in pairs {
        for v in [x, y] {
            if v >= n || v0s.contains(v) || bs.contains(v) || !ends.insert(v) {
                return Err(Error::input(format!("endpoint {v} repeated, out of range, or inside V₀ ∪ B")));
            }
        }
    }
    // Work in G − B, relabelled.
    let keep: Vec<usize> = (0..n).filter(|v| !bs.contains(*v)).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        index[v] = i;
    }
    let gp = g.induced(&keep);
    let d = params.d_extend(n);
    let m = params.m_extend(n).floor().max(1.0) as usize;
    let mut s = Subgraph::edgeless(keep.len(), keep.iter().enumerate().filter(|(_, v)| !v0s.contains(**v)).map(|(i, _)| i));
    let opts = ExtendOptions::from_params(params);
    let mut paths = Vec::with_capacity(pairs.len());
    for (i, (&(x, y), &len)) in pairs.iter().zip(lengths).enumerate() {
        let p = extend_path(&gp, &s, index[x], index[y], len, d, m, &opts, rng).map_err(|e| match e {
            Error::Connection { stage, detail, .. } => Error::Connection { pair: i, stage, detail },
            other => other,
        })?;
        s.add_path(&p);
        paths.push(p.into_iter().map(|v| keep[v]).collect::<Vec<_>>());
    }
    let mut taken = bs.clone();
    for p in &paths {
        for &v in &p[1..p.len() - 1] {
            taken.insert(v);
        }
    }
    let residual: Vec<usize> = v0.iter().copied().filter(|v| !taken.contains(*v)).collect();
    let mut sorted = residual.clone();
    sorted.sort_unstable();
    let h = g.induced(&sorted);
    let mode = if h.n() <= params.exact_cap.min(crate::expander::EXACT_CAP) {
        CheckMode::Exact
    } else {
        CheckMode::Sampled { trials: params.sampled_trials }
    };
    let mut verdict = is_k_expander(&h, params.expander_ratio, params.expander_frac, mode, rng)?;
    if let Some(w) = verdict.witness.as_mut() {
        for v in w.iter_mut() {
            *v = sorted[*v];
        }
    }
    Ok(Connection { paths, residual: sorted, residual_expander: verdict })
}
