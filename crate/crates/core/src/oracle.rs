//! Exact containment decisions for oriented spanning cycles.
//!
//! `find_embedding` runs a subset DP where `reach[S]` is the bit-set of vertices that can
//! end a partial copy of positions `0..|S|` using exactly the vertices of `S`.

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::pattern::{canonical_table, OrientationPattern};
use serde::Serialize;

pub const EMBED_CAP: usize = 22;
pub const ALL_PATTERNS_CAP: usize = 14;

struct Masks {
    out: Vec<u32>,
    inn: Vec<u32>,
}

impl Masks {
    fn of(d: &Digraph) -> Self {
        let row = |s: &crate::bitset::BitSet| s.iter().fold(0u32, |m, w| m | (1 << w));
        Masks {
            out: (0..d.n()).map(|v| row(d.out_adj(v))).collect(),
            inn: (0..d.n()).map(|v| row(d.in_adj(v))).collect(),
        }
    }
}

/// Searches for a copy of `c` in `d` with `map(pos) = v` for every pin `(pos, v)`.
pub fn find_embedding(
    d: &Digraph,
    c: &OrientationPattern,
    pins: &[(usize, usize)],
) -> Result<Option<Embedding>> {
    let n = c.len();
    if d.n() != n {
        return Err(Error::input(format!(
            "digraph has {} vertices, pattern has {n}",
            d.n()
        )));
    }
    if n > EMBED_CAP {
        return Err(Error::input(format!("oracle capped at n={EMBED_CAP}, got {n}")));
    }
    let mut pin_pos = vec![None; n];
    let mut pinned_vertices = 0u32;
    for &(pos, v) in pins {
        if pos >= n || v >= n {
            return Err(Error::input(format!("pin ({pos},{v}) out of range")));
        }
        if pin_pos[pos].is_some() || pinned_vertices >> v & 1 == 1 {
            return Err(Error::input("inconsistent pins"));
        }
        pin_pos[pos] = Some(v);
        pinned_vertices |= 1 << v;
    }
    let masks = Masks::of(d);
    let mut reach = vec![0u32; 1usize << n];
    let offsets: Vec<(usize, usize)> = match pins.first() {
        Some(&(p0, v0)) => vec![(p0, v0)],
        None => {
            // vertex 0 must sit somewhere; skip rotations that repeat the same sequence
            let mut seen = std::collections::HashSet::new();
            (0..n)
                .filter(|&r| seen.insert(c.rotate(r)))
                .map(|r| (r, 0))
                .collect()
        }
    };
    for (r, start) in offsets {
        let rc = c.rotate(r);
        let rel_pins: Vec<Option<usize>> = (0..n).map(|k| pin_pos[(k + r) % n]).collect();
        if let Some(local) = run_dp(&masks, &rc, start, &rel_pins, pinned_vertices, &mut reach) {
            let mut map = vec![0; n];
            for (k, v) in local.into_iter().enumerate() {
                map[(k + r) % n] = v;
            }
            let e = Embedding::new(map, pins.to_vec());
            debug_assert!(e.is_valid(d, c));
            return Ok(Some(e));
        }
    }
    Ok(None)
}

fn run_dp(
    m: &Masks,
    c: &OrientationPattern,
    start: usize,
    pins: &[Option<usize>],
    pinned: u32,
    reach: &mut [u32],
) -> Option<Vec<usize>> {
    let n = c.len();
    if let Some(v) = pins[0] {
        if v != start {
            return None;
        }
    } else if pinned >> start & 1 == 1 {
        return None;
    }
    reach.iter_mut().for_each(|x| *x = 0);
    let full = ((1u64 << n) - 1) as u32;
    reach[1 << start] = 1 << start;
    for mask in 0..=full {
        let ends = reach[mask as usize];
        if ends == 0 {
            continue;
        }
        let t = mask.count_ones() as usize;
        if t == n {
            continue;
        }
        let adj = if c.forward(t - 1) { &m.out } else { &m.inn };
        let mut cand = 0u32;
        let mut e = ends;
        while e != 0 {
            cand |= adj[e.trailing_zeros() as usize];
            e &= e - 1;
        }
        cand &= !mask;
        cand &= match pins[t] {
            Some(u) => 1 << u,
            None => !pinned,
        };
        while cand != 0 {
            let w = cand.trailing_zeros();
            cand &= cand - 1;
            reach[(mask | 1 << w) as usize] |= 1 << w;
        }
    }
    let closing = if c.forward(n - 1) { &m.inn } else { &m.out };
    let last = reach[full as usize] & closing[start];
    if last == 0 {
        return None;
    }
    let mut seq = vec![0usize; n];
    let mut v = last.trailing_zeros() as usize;
    let mut mask = full;
    for t in (1..n).rev() {
        seq[t] = v;
        mask ^= 1 << v;
        // predecessor u at position t-1 with the pattern edge between u and v
        let back = if c.forward(t - 1) { m.inn[v] } else { m.out[v] };
        let u = reach[mask as usize] & back;
        v = u.trailing_zeros() as usize;
    }
    seq[0] = start;
    Some(seq)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllPatternsVerdict {
    pub all_contained: bool,
    pub first_missing: Option<String>,
    pub classes_required: usize,
}

/// Decides whether `d` contains every canonical pattern class outside `exceptions`.
pub fn contains_all_patterns(
    d: &Digraph,
    exceptions: &[OrientationPattern],
) -> Result<AllPatternsVerdict> {
    let n = d.n();
    if n > ALL_PATTERNS_CAP {
        return Err(Error::input(format!(
            "all-patterns oracle capped at n={ALL_PATTERNS_CAP}, got {n}"
        )));
    }
    if n < 3 {
        return Err(Error::input("patterns need n ≥ 3"));
    }
    let table = canonical_table(n);
    let mut excluded = vec![false; table.len()];
    for e in exceptions {
        if e.len() != n {
            return Err(Error::input("exception pattern has the wrong length"));
        }
        excluded[table[e.mask() as usize] as usize] = true;
    }
    let mut required: Vec<OrientationPattern> = (0..table.len())
        .filter(|&m| table[m] as usize == m && !excluded[m])
        .map(|m| OrientationPattern::from_mask(n, m as u64).unwrap())
        .collect();
    required.sort();
    let classes_required = required.len();
    let missing = |p: &OrientationPattern| AllPatternsVerdict {
        all_contained: false,
        first_missing: Some(p.to_string()),
        classes_required,
    };
    if required.is_empty() {
        return Ok(AllPatternsVerdict {
            all_contained: true,
            first_missing: None,
            classes_required,
        });
    }
    let u = d.underlying();
    if (0..n).any(|v| u.deg(v, None) < 2) {
        return Ok(missing(&required[0]));
    }
    let mut covered = vec![false; table.len()];
    let mut remaining = required.len();
    cover_by_cycle_enumeration(d, &table, &excluded, &mut covered, &mut remaining, 2_000_000);
    for p in &required {
        if covered[p.mask() as usize] {
            continue;
        }
        if find_embedding(d, p, &[])?.is_none() {
            return Ok(missing(p));
        }
    }
    Ok(AllPatternsVerdict {
        all_contained: true,
        first_missing: None,
        classes_required,
    })
}

/// Walks undirected Hamilton cycles through vertex 0 and marks every orientation pattern
/// they realise. Stops when nothing required remains or the step budget runs out.
fn cover_by_cycle_enumeration(
    d: &Digraph,
    table: &[u32],
    excluded: &[bool],
    covered: &mut [bool],
    remaining: &mut usize,
    budget: usize,
) {
    let n = d.n();
    let m = Masks::of(d);
    let und: Vec<u32> = (0..n).map(|v| m.out[v] | m.inn[v]).collect();
    let mut path = vec![0usize];
    let mut steps = 0usize;

    fn rec(
        path: &mut Vec<usize>,
        used: u32,
        und: &[u32],
        m: &Masks,
        n: usize,
        table: &[u32],
        excluded: &[bool],
        covered: &mut [bool],
        remaining: &mut usize,
        steps: &mut usize,
        budget: usize,
    ) -> bool {
        *steps += 1;
        if *remaining == 0 || *steps > budget {
            return true;
        }
        let last = *path.last().unwrap();
        if path.len() == n {
            if und[last] & 1 == 0 || path[1] > path[n - 1] {
                return false;
            }
            mark_orientations(path, m, table, excluded, covered, remaining);
            return *remaining == 0;
        }
        let mut cand = und[last] & !used;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            path.push(w);
            let stop = rec(
                path,
                used | 1 << w,
                und,
                m,
                n,
                table,
                excluded,
                covered,
                remaining,
                steps,
                budget,
            );
            path.pop();
            if stop {
                return true;
            }
        }
        false
    }

    rec(
        &mut path, 1, &und, &m, n, table, excluded, covered, remaining, &mut steps, budget,
    );
}

fn mark_orientations(
    cycle: &[usize],
    m: &Masks,
    table: &[u32],
    excluded: &[bool],
    covered: &mut [bool],
    remaining: &mut usize,
) {
    let n = cycle.len();
    let mut fixed = 0u32;
    let mut free = Vec::new();
    for k in 0..n {
        let (a, b) = (cycle[k], cycle[(k + 1) % n]);
        let fwd = m.out[a] >> b & 1 == 1;
        let bwd = m.inn[a] >> b & 1 == 1;
        match (fwd, bwd) {
            (true, true) => free.push(k),
            (true, false) => fixed |= 1 << k,
            _ => {}
        }
    }
    for sub in 0u32..(1u32 << free.len()) {
        let mut mask = fixed;
        for (i, &k) in free.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask |= 1 << k;
            }
        }
        let c = table[mask as usize] as usize;
        if !excluded[c] && !covered[c] {
            covered[c] = true;
            *remaining -= 1;
        }
    }
}

/// `P(c ⊑ D(n,p))` by enumerating all `2^{n(n-1)}` digraphs; `n ≤ 4`.
pub fn exact_containment_probability(n: usize, p: f64, c: &OrientationPattern) -> Result<f64> {
    if n > 4 {
        return Err(Error::input(format!("exact enumeration needs n ≤ 4, got {n}")));
    }
    if c.len() != n {
        return Err(Error::input("pattern length must equal n"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("probability {p} outside [0,1]")));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut total = 0.0;
    for mask in 0u32..(1u32 << pairs.len()) {
        let k = mask.count_ones() as i32;
        let w = p.powi(k) * (1.0 - p).powi(pairs.len() as i32 - k);
        if w == 0.0 {
            continue;
        }
        let mut d = Digraph::new(n);
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d.add_edge(u, v);
            }
        }
        if find_embedding(&d, c, &[])?.is_some() {
            total += w;
        }
    }
    Ok(total)
}
