//! The random digraph process as a lazily shuffled order of all `n(n-1)` edges.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::models::directed_pair;
use crate::rng::StreamRng;
use rand::Rng;
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Clone, Debug)]
struct LazyShuffle {
    total: usize,
    pos: usize,
    swaps: HashMap<usize, usize>,
    rng: StreamRng,
}

impl LazyShuffle {
    fn next(&mut self) -> Option<usize> {
        if self.pos >= self.total {
            return None;
        }
        let j = self.rng.gen_range(self.pos..self.total);
        let at_j = self.swaps.get(&j).copied().unwrap_or(j);
        let at_pos = self.swaps.remove(&self.pos).unwrap_or(self.pos);
        if j != self.pos {
            self.swaps.insert(j, at_pos);
        }
        self.pos += 1;
        Some(at_j)
    }
}

#[derive(Clone, Debug)]
pub struct ProcessTrace {
    n: usize,
    drawn: Vec<(u32, u32)>,
    shuffle: Option<LazyShuffle>,
}

pub fn sample_process(n: usize, rng: StreamRng) -> ProcessTrace {
    ProcessTrace {
        n,
        drawn: Vec::new(),
        shuffle: Some(LazyShuffle {
            total: n * n.saturating_sub(1),
            pos: 0,
            swaps: HashMap::new(),
            rng,
        }),
    }
}

impl ProcessTrace {
    /// Trace with an explicit full order; must be a permutation of all directed pairs.
    pub fn from_order(n: usize, order: Vec<(usize, usize)>) -> Result<Self> {
        let total = n * n.saturating_sub(1);
        if order.len() != total {
            return Err(Error::input(format!(
                "trace has {} edges, expected {total}",
                order.len()
            )));
        }
        let mut seen = vec![false; n * n];
        for &(u, v) in &order {
            if u >= n || v >= n || u == v || std::mem::replace(&mut seen[u * n + v], true) {
                return Err(Error::input(format!("trace edge ({u},{v}) invalid or repeated")));
            }
        }
        Ok(ProcessTrace {
            n,
            drawn: order.into_iter().map(|(u, v)| (u as u32, v as u32)).collect(),
            shuffle: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    /// Materialises the first `i` edges.
    pub fn ensure(&mut self, i: usize) -> Result<()> {
        if i > self.total() {
            return Err(Error::input(format!(
                "index {i} beyond process length {}",
                self.total()
            )));
        }
        while self.drawn.len() < i {
            let e = self
                .shuffle
                .as_mut()
                .and_then(|s| s.next())
                .expect("shuffle exhausted early");
            let (u, v) = directed_pair(self.n, e);
            self.drawn.push((u as u32, v as u32));
        }
        Ok(())
    }

    /// The `i`-th added edge, 1-indexed as in `D_i`.
    pub fn edge(&mut self, i: usize) -> Result<(usize, usize)> {
        if i == 0 {
            return Err(Error::input("edges are numbered from 1"));
        }
        self.ensure(i)?;
        let (u, v) = self.drawn[i - 1];
        Ok((u as usize, v as usize))
    }

    pub fn materialized(&self) -> &[(u32, u32)] {
        &self.drawn
    }

    pub fn prefix(&mut self, i: usize) -> Result<Digraph> {
        self.ensure(i)?;
        let mut d = Digraph::new(self.n);
        for &(u, v) in &self.drawn[..i] {
            d.add_edge(u as usize, v as usize);
        }
        Ok(d)
    }

    /// Prefix digraphs at each requested index, built in one incremental pass.
    pub fn prefixes(&mut self, indices: &[usize]) -> Result<Vec<Digraph>> {
        let mut order: Vec<usize> = (0..indices.len()).collect();
        order.sort_by_key(|&k| indices[k]);
        let mut out = vec![Digraph::new(self.n); indices.len()];
        let mut cursor = PrefixCursor::new(self.n);
        for k in order {
            cursor.advance_to(self, indices[k])?;
            out[k] = cursor.digraph().clone();
        }
        Ok(out)
    }

    pub fn to_text(&mut self) -> String {
        let total = self.total();
        self.ensure(total).expect("total in range");
        let mut s = format!("{}\n", self.n);
        for &(u, v) in &self.drawn {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::input("trace header must be a single integer n"))?;
        let mut order = Vec::new();
        for l in lines {
            let t: Vec<usize> = l
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::input(format!("bad trace line {l:?}"))))
                .collect::<Result<_>>()?;
            if t.len() != 2 {
                return Err(Error::input(format!("bad trace line {l:?}")));
            }
            order.push((t[0], t[1]));
        }
        Self::from_order(n, order)
    }
}

/// Incrementally grown prefix digraph.
#[derive(Clone, Debug)]
pub struct PrefixCursor {
    d: Digraph,
    at: usize,
}

impl PrefixCursor {
    pub fn new(n: usize) -> Self {
        PrefixCursor {
            d: Digraph::new(n),
            at: 0,
        }
    }

    pub fn at(&self) -> usize {
        self.at
    }

    pub fn digraph(&self) -> &Digraph {
        &self.d
    }

    pub fn advance_to(&mut self, trace: &mut ProcessTrace, i: usize) -> Result<()> {
        if i < self.at {
            return Err(Error::input("prefix cursor cannot move backwards"));
        }
        trace.ensure(i)?;
        for &(u, v) in &trace.materialized()[self.at..i] {
            self.d.add_edge(u as usize, v as usize);
        }
        self.at = i;
        Ok(())
    }
}

/// Snapshots every `stride` edges so arbitrary prefixes are cheap to rebuild.
#[derive(Clone, Debug)]
pub struct Checkpoints {
    stride: usize,
    snaps: Vec<Digraph>,
}

impl Checkpoints {
    pub fn build(trace: &mut ProcessTrace, stride: usize, upto: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::input("checkpoint stride must be positive"));
        }
        let mut cursor = PrefixCursor::new(trace.n());
        let mut snaps = vec![cursor.digraph().clone()];
        let mut i = stride;
        while i <= upto {
            cursor.advance_to(trace, i)?;
            snaps.push(cursor.digraph().clone());
            i += stride;
        }
        trace.ensure(upto)?;
        Ok(Checkpoints { stride, snaps })
    }

    pub fn prefix(&self, trace: &ProcessTrace, i: usize) -> Result<Digraph> {
        let k = (i / self.stride).min(self.snaps.len() - 1);
        let base = k * self.stride;
        if i > trace.materialized().len() {
            return Err(Error::input(format!("index {i} not materialised")));
        }
        let mut d = self.snaps[k].clone();
        for &(u, v) in &trace.materialized()[base..i] {
            d.add_edge(u as usize, v as usize);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn prefixes_and_permutation() {
        let mut t = sample_process(6, stream_rng(9, 0));
        assert_eq!(t.prefix(0).unwrap().m(), 0);
        assert!(t.prefix(30).unwrap().is_complete());
        assert!(t.prefix(31).unwrap_err().is_input());
        let text = t.to_text();
        let mut back = ProcessTrace::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        let ps = t.prefixes(&[10, 3, 20]).unwrap();
        assert_eq!(ps[1], t.prefix(3).unwrap());
        assert_eq!(ps[0].m(), 10);
    }

    #[test]
    fn lazy_prefix_matches_eager() {
        let mut a = sample_process(9, stream_rng(4, 2));
        let mut b = sample_process(9, stream_rng(4, 2));
        b.ensure(72).unwrap();
        assert_eq!(a.prefix(17).unwrap(), b.prefix(17).unwrap());
        let cp = Checkpoints::build(&mut a, 5, 72).unwrap();
        for i in [0, 4, 5, 23, 72] {
            assert_eq!(cp.prefix(&a, i).unwrap(), b.prefix(i).unwrap());
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(ProcessTrace::from_order(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(ProcessTrace::from_order(2, vec![(0, 1)]).is_err());
        assert!(ProcessTrace::from_order(2, vec![(0, 1), (1, 0)]).is_ok());
    }
}
