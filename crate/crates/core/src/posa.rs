//! Pósa rotations with a fixed edge, e-boosters, and sprinkled Hamilton path search.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::UGraph;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};

pub const BOOSTER_CAP: usize = 18;

fn same_edge(a: (usize, usize), b: (usize, usize)) -> bool {
    a == b || a == (b.1, b.0)
}

/// `(Q − u_i u_{i+1}) + u_ℓ u_i`: keeps `u₀` and the fixed edge, new endpoint `u_{i+1}`.
pub fn rotate(path: &[usize], fixed_edge: (usize, usize), i: usize) -> Result<Vec<usize>> {
    let l = path.len().checked_sub(1).ok_or_else(|| Error::input("empty path"))?;
    if l < 2 || i + 1 >= l {
        return Err(Error::input(format!("pivot index {i} must satisfy i ≤ ℓ−2 = {}", l as isize - 2)));
    }
    if same_edge((path[i], path[i + 1]), fixed_edge) {
        return Err(Error::input("rotation would delete the fixed edge"));
    }
    let mut out = path[..=i].to_vec();
    out.extend(path[i + 1..].iter().rev());
    Ok(out)
}

/// The rotation closure of a path with `u₀ = path[0]` and `e` fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationState {
    pub path: Vec<usize>,
    pub fixed_end: usize,
    pub fixed_edge: (usize, usize),
    /// `(endpoint, path)` in discovery order, starting with the original path.
    pub reachable: Vec<(usize, Vec<usize>)>,
}

impl RotationState {
    pub fn closure(g: &UGraph, path: &[usize], fixed_edge: (usize, usize)) -> Self {
        let mut reachable = Vec::new();
        closure_walk(g, path, fixed_edge, |q| {
            reachable.push((*q.last().unwrap(), q.to_vec()));
            false
        });
        RotationState { path: path.to_vec(), fixed_end: path[0], fixed_edge, reachable }
    }

    pub fn endpoints(&self) -> Vec<usize> {
        self.reachable.iter().map(|r| r.0).collect()
    }
}

/// BFS over endpoint states, lowest new endpoint first. `visit` returns `true` to stop early.
fn closure_walk(g: &UGraph, path: &[usize], e: (usize, usize), mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let n = g.n();
    let mut seen = BitSet::new(n);
    seen.insert(*path.last().unwrap());
    let mut queue = VecDeque::from([path.to_vec()]);
    let mut pos = vec![usize::MAX; n];
    while let Some(q) = queue.pop_front() {
        if visit(&q) {
            return true;
        }
        let l = q.len() - 1;
        if l < 2 {
            continue;
        }
        for (k, &v) in q.iter().enumerate() {
            pos[v] = k;
        }
        let end = q[l];
        let mut next: Vec<usize> = g
            .adj(end)
            .iter()
            .filter(|&u| pos[u] != usize::MAX && pos[u] + 1 < l)
            .map(|u| pos[u])
            .filter(|&i| !same_edge((q[i], q[i + 1]), e) && !seen.contains(q[i + 1]))
            .collect();
        next.sort_by_key(|&i| q[i + 1]);
        for i in next {
            if seen.insert(q[i + 1]) {
                queue.push_back(rotate(&q, e, i).expect("pivot checked"));
            }
        }
        for &v in &q {
            pos[v] = usize::MAX;
        }
    }
    false
}

/// Path-with-e DP tables over subsets for `n ≤ BOOSTER_CAP`.
struct Tables {
    n: usize,
    adj: Vec<u32>,
}

impl Tables {
    fn new(g: &UGraph, e: (usize, usize)) -> Self {
        let n = g.n();
        let mut adj: Vec<u32> = (0..n).map(|v| g.adj(v).iter().fold(0u32, |m, u| m | 1 << u)).collect();
        adj[e.0] |= 1 << e.1;
        adj[e.1] |= 1 << e.0;
        Tables { n, adj }
    }

    /// `t[S]` = ends of paths from `start` with vertex set `S`, never entering `avoid`.
    fn from_start(&self, start: usize, avoid: usize) -> Vec<u32> {
        let full = 1usize << self.n;
        let mut t = vec![0u32; full];
        t[1 << start] = 1 << start;
        for s in 0..full {
            let ends = t[s];
            if ends == 0 {
                continue;
            }
            for v in bits(ends) {
                let mut nb = self.adj[v] & !(s as u32) & !(1 << avoid);
                while nb != 0 {
                    let w = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    t[s | 1 << w] |= 1 << w;
                }
            }
        }
        t
    }

    /// `(any, with_e)`: ends of paths with vertex set `S`, and of those using `e`.
    fn all_paths(&self, e: (usize, usize)) -> (Vec<u32>, Vec<u32>) {
        let full = 1usize << self.n;
        let mut z0 = vec![0u32; full];
        let mut z1 = vec![0u32; full];
        for v in 0..self.n {
            z0[1 << v] = 1 << v;
        }
        for s in 0..full {
            for (flag, ends) in [(false, z0[s]), (true, z1[s])] {
                for v in bits(ends) {
                    let mut nb = self.adj[v] & !(s as u32);
                    while nb != 0 {
                        let w = nb.trailing_zeros() as usize;
                        nb &= nb - 1;
                        if flag || same_edge((v, w), e) {
                            z1[s | 1 << w] |= 1 << w;
                        } else {
                            z0[s | 1 << w] |= 1 << w;
                        }
                    }
                }
            }
        }
        for s in 0..full {
            z0[s] |= z1[s];
        }
        (z0, z1)
    }
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

fn check_booster_input(g: &UGraph, e: (usize, usize), cap: usize) -> Result<()> {
    let n = g.n();
    if n > cap {
        return Err(Error::input(format!("booster computation capped at n={cap}, got {n}")));
    }
    if n < 3 || e.0 == e.1 || e.0 >= n || e.1 >= n {
        return Err(Error::input("need n ≥ 3 and e a pair of distinct vertices"));
    }
    Ok(())
}

/// All pairs `f` (existing edges included) that are e-boosters for `g`.
pub fn booster_set(g: &UGraph, e: (usize, usize)) -> Result<Vec<(usize, usize)>> {
    check_booster_input(g, e, BOOSTER_CAP)?;
    let n = g.n();
    let t = Tables::new(g, e);
    let full = (1usize << n) - 1;
    let (any, with_e) = t.all_paths(e);
    let longest = (0..=full).filter(|&s| with_e[s] != 0).map(|s| s.count_ones()).max().unwrap() as usize;

    let mut boost = vec![vec![false; n]; n];
    // Hamilton paths through e, split as x-side and y-side.
    let tx = t.from_start(e.0, e.1);
    let ty = t.from_start(e.1, e.0);
    let mut ham_cycle = false;
    for sx in 0..=full {
        if tx[sx] == 0 || sx >> e.1 & 1 == 1 {
            continue;
        }
        let sy = full & !sx;
        if ty[sy] == 0 {
            continue;
        }
        for a in bits(tx[sx]) {
            for b in bits(ty[sy]) {
                boost[a][b] = true;
                boost[b][a] = true;
                if t.adj[a] >> b & 1 == 1 {
                    ham_cycle = true;
                }
            }
        }
    }
    if ham_cycle {
        return Ok(crate::models::unordered_pairs(n));
    }
    // Longer path through e using f = ab: a path with e ending at a, plus a disjoint path ending at b.
    for b in 0..n {
        let mut best = vec![0u8; full + 1];
        for s in 0..=full {
            if any[s] >> b & 1 == 1 {
                best[s] = s.count_ones() as u8;
            }
        }
        for i in 0..n {
            for s in 0..=full {
                if s >> i & 1 == 1 {
                    best[s] = best[s].max(best[s ^ 1 << i]);
                }
            }
        }
        for s1 in 0..=full {
            if with_e[s1] == 0 || s1 >> b & 1 == 1 {
                continue;
            }
            let rest = best[full & !s1] as usize;
            if rest > 0 && s1.count_ones() as usize + rest >= longest + 1 {
                for a in bits(with_e[s1]) {
                    boost[a][b] = true;
                    boost[b][a] = true;
                }
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if boost[a][b] && t.adj[a] >> b & 1 == 0 {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Literal reading of the definition: add `f`, recompute the longest e-path and test for a
/// Hamilton cycle through `e`. Exponential in n for every pair; used to cross-check.
pub fn booster_set_literal(g: &UGraph, e: (usize, usize)) -> Result<Vec<(usize, usize)>> {
    check_booster_input(g, e, 12)?;
    let n = g.n();
    let base = longest_e_path(g, e, None);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let f = Some((a, b));
            if longest_e_path(g, e, f) > base || ham_cycle_through(g, e, f) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

fn masks_with(g: &UGraph, extra: &[(usize, usize)]) -> Vec<u32> {
    let mut adj: Vec<u32> = (0..g.n()).map(|v| g.adj(v).iter().fold(0u32, |m, u| m | 1 << u)).collect();
    for &(a, b) in extra {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

/// Number of edges of the longest path through `e` in `g + e (+ f)`; walks (set, last, used-e).
fn longest_e_path(g: &UGraph, e: (usize, usize), f: Option<(usize, usize)>) -> usize {
    let n = g.n();
    let mut extra = vec![e];
    extra.extend(f);
    let adj = masks_with(g, &extra);
    let full = 1usize << n;
    let mut state = vec![[0u32; 2]; full];
    for v in 0..n {
        state[1 << v][0] |= 1 << v;
    }
    let mut best = 0;
    for s in 1..full {
        for used in 0..2 {
            let mut ends = state[s][used];
            if used == 1 && ends != 0 {
                best = best.max(s.count_ones() as usize - 1);
            }
            while ends != 0 {
                let v = ends.trailing_zeros() as usize;
                ends &= ends - 1;
                for w in 0..n {
                    if adj[v] >> w & 1 == 1 && s >> w & 1 == 0 {
                        let u = used == 1 || (v, w) == e || (w, v) == e;
                        state[s | 1 << w][u as usize] |= 1 << w;
                    }
                }
            }
        }
    }
    best
}

/// Hamilton cycle through `e` in `g + e (+ f)`: a Hamilton x,y-path avoiding the edge `xy`.
fn ham_cycle_through(g: &UGraph, e: (usize, usize), f: Option<(usize, usize)>) -> bool {
    let n = g.n();
    let mut adj = masks_with(g, &f.into_iter().collect::<Vec<_>>());
    adj[e.0] &= !(1 << e.1);
    adj[e.1] &= !(1 << e.0);
    let full = 1usize << n;
    let mut reach = vec![0u32; full];
    reach[1 << e.0] = 1 << e.0;
    for s in 1..full {
        let mut ends = reach[s];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut nb = adj[v] & !(s as u32);
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                reach[s | 1 << w] |= 1 << w;
            }
        }
    }
    reach[full - 1] >> e.1 & 1 == 1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PosaOutcome {
    pub path: Vec<usize>,
    /// Sprinkled edges read from the stream, in order.
    pub consumed: Vec<(usize, usize)>,
    pub improvements: usize,
}

enum Step {
    Improved(Vec<usize>),
    HamCycle(Vec<usize>),
    Stuck { ends: BitSet, pairs: HashSet<(usize, usize)>, closed: bool },
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn off_path_neighbour(h: &UGraph, v: usize, on: &BitSet) -> Option<usize> {
    h.adj(v).iter().find(|&w| !on.contains(w))
}

/// Opens the cycle `cycle` (closing edge last–first) at a vertex with an outside neighbour.
fn open_cycle(h: &UGraph, cycle: &[usize], on: &BitSet, e: (usize, usize)) -> Option<Vec<usize>> {
    let k = cycle.len();
    for (idx, &z) in cycle.iter().enumerate() {
        if let Some(w) = off_path_neighbour(h, z, on) {
            let prev = cycle[(idx + k - 1) % k];
            let rot: Vec<usize> = if !same_edge((prev, z), e) {
                (0..k).map(|t| cycle[(idx + t) % k]).collect()
            } else {
                (0..k).map(|t| cycle[(idx + k - t) % k]).collect()
            };
            let mut p = vec![w];
            p.extend(rot);
            return Some(p);
        }
    }
    None
}

fn improve(h: &UGraph, path: &[usize], e: (usize, usize)) -> Step {
    let n = h.n();
    let mut p: VecDeque<usize> = path.iter().copied().collect();
    let mut on = BitSet::from_iter(n, path.iter().copied());
    let mut grew = false;
    loop {
        if let Some(w) = off_path_neighbour(h, *p.back().unwrap(), &on) {
            p.push_back(w);
        } else if let Some(w) = off_path_neighbour(h, *p.front().unwrap(), &on) {
            p.push_front(w);
        } else {
            break;
        }
        on.insert(*p.back().unwrap());
        on.insert(*p.front().unwrap());
        grew = true;
    }
    let p: Vec<usize> = p.into_iter().collect();
    if grew {
        return Step::Improved(p);
    }
    let mut ends = BitSet::new(n);
    let mut pairs = HashSet::new();
    let mut closed = false;
    let mut result: Option<Step> = None;
    let mut level1: Vec<Vec<usize>> = Vec::new();
    let inspect = |q: &[usize], ends: &mut BitSet, pairs: &mut HashSet<(usize, usize)>, closed: &mut bool| -> Option<Step> {
        let (a, b) = (q[0], *q.last().unwrap());
        ends.insert(a);
        ends.insert(b);
        pairs.insert(key(a, b));
        if let Some(w) = off_path_neighbour(h, b, &on) {
            let mut r = q.to_vec();
            r.push(w);
            return Some(Step::Improved(r));
        }
        if q.len() >= 3 && h.has_edge(a, b) && !same_edge((a, b), e) {
            if q.len() == n {
                return Some(Step::HamCycle(q.to_vec()));
            }
            *closed = true;
            if let Some(r) = open_cycle(h, q, &on, e) {
                return Some(Step::Improved(r));
            }
        }
        None
    };
    closure_walk(h, &p, e, |q| {
        level1.push(q.to_vec());
        result = inspect(q, &mut ends, &mut pairs, &mut closed);
        result.is_some()
    });
    if let Some(s) = result {
        return s;
    }
    for q in &level1 {
        let rev: Vec<usize> = q.iter().rev().copied().collect();
        closure_walk(h, &rev, e, |r| {
            result = inspect(r, &mut ends, &mut pairs, &mut closed);
            result.is_some()
        });
        if let Some(s) = result {
            return s;
        }
    }
    Step::Stuck { ends, pairs, closed }
}

/// Rotation-extension in `G₀ + xy`, absorbing sprinkled edges lazily; on a Hamilton cycle
/// through `xy` returns the Hamilton x,y-path obtained by deleting `xy`.
pub fn posa_ham_path(
    g0: &UGraph,
    x: usize,
    y: usize,
    sprinkle: &mut dyn Iterator<Item = (usize, usize)>,
    budget: usize,
) -> Result<Option<PosaOutcome>> {
    let n = g0.n();
    if x == y || x >= n || y >= n {
        return Err(Error::input("x and y must be distinct vertices"));
    }
    let e = (x, y);
    let mut h = g0.clone();
    h.add_edge(x, y);
    let mut path = vec![x, y];
    let mut consumed = Vec::new();
    let mut improvements = 0;
    const STALE_LIMIT: usize = 8;
    loop {
        match improve(&h, &path, e) {
            Step::Improved(p) => {
                debug_assert!(p.windows(2).any(|w| same_edge((w[0], w[1]), e)));
                path = p;
                improvements += 1;
            }
            Step::HamCycle(c) => {
                let k = c.iter().position(|&v| v == x).unwrap();
                let rot: Vec<usize> = (0..n).map(|t| c[(k + t) % n]).collect();
                let out = if rot[1] == y {
                    let mut p = vec![x];
                    p.extend(rot[1..].iter().rev());
                    p
                } else {
                    rot
                };
                debug_assert_eq!(*out.last().unwrap(), y);
                return Ok(Some(PosaOutcome { path: out, consumed, improvements }));
            }
            Step::Stuck { ends, pairs, closed } => {
                let on = BitSet::from_iter(n, path.iter().copied());
                let mut stale = 0;
                loop {
                    if consumed.len() >= budget {
                        return Ok(None);
                    }
                    let Some((u, v)) = sprinkle.next() else { return Ok(None) };
                    if u == v || u >= n || v >= n {
                        continue;
                    }
                    consumed.push((u, v));
                    if !h.add_edge(u, v) {
                        continue;
                    }
                    let crossing = on.contains(u) != on.contains(v);
                    let touches = ends.contains(u) || ends.contains(v);
                    if pairs.contains(&key(u, v)) || (crossing && (touches || closed)) {
                        break;
                    }
                    if touches {
                        stale += 1;
                        if stale >= STALE_LIMIT {
                            break;
                        }
                    }
                }
            }
        }
    }
}
