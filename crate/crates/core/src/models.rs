//! Samplers for D(n,p), D*(n,q) and G(n,p).

use crate::error::{Error, Result};
use crate::graph::{biorient, Digraph, UGraph};
use rand::Rng;

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::input(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

/// Indices in `0..total` each kept independently with probability `p`, via geometric skips.
fn bernoulli_indices<R: Rng>(total: usize, p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 || total == 0 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..total).collect();
    }
    let mut out = Vec::with_capacity((total as f64 * p * 1.1) as usize + 8);
    if p > 0.25 {
        for i in 0..total {
            if rng.gen_bool(p) {
                out.push(i);
            }
        }
        return out;
    }
    let log_q = (1.0 - p).ln();
    let mut i: usize = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (total - i) as f64 {
            break;
        }
        i += skip as usize;
        out.push(i);
        i += 1;
        if i >= total {
            break;
        }
    }
    out
}

/// Decodes an index in `0..n(n-1)` to an ordered pair.
#[inline]
pub fn directed_pair(n: usize, e: usize) -> (usize, usize) {
    let u = e / (n - 1);
    let r = e % (n - 1);
    (u, if r < u { r } else { r + 1 })
}

/// Decodes an index in `0..n(n-1)/2` to the lexicographically ordered pair `x < y`.
pub fn unordered_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            v.push((x, y));
        }
    }
    v
}

pub fn sample_dnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Digraph> {
    check_p(p)?;
    let mut d = Digraph::new(n);
    if n < 2 {
        return Ok(d);
    }
    for e in bernoulli_indices(n * (n - 1), p, rng) {
        let (u, v) = directed_pair(n, e);
        d.add_edge(u, v);
    }
    Ok(d)
}

pub fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<UGraph> {
    check_p(p)?;
    let mut g = UGraph::new(n);
    if n < 2 {
        return Ok(g);
    }
    let total = n * (n - 1) / 2;
    let idx = bernoulli_indices(total, p, rng);
    // walk rows to decode lexicographic pair indices
    let mut row = 0usize;
    let mut row_start = 0usize;
    for e in idx {
        while e >= row_start + (n - 1 - row) {
            row_start += n - 1 - row;
            row += 1;
        }
        g.add_edge(row, row + 1 + (e - row_start));
    }
    Ok(g)
}

/// Each antiparallel pair present together with probability `q`.
pub fn sample_dstar<R: Rng>(n: usize, q: f64, rng: &mut R) -> Result<Digraph> {
    Ok(biorient(&sample_gnp(n, q, rng)?))
}
