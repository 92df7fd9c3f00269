//! Directed and undirected graphs on `0..n` with bit-set adjacency.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Edge direction relative to a vertex: `Out` is the `+` side, `In` the `-` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Out,
    In,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Out => Sign::In,
            Sign::In => Sign::Out,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Out, Sign::In];
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<BitSet>,
    in_adj: Vec<BitSet>,
    m: usize,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            out_adj: vec![BitSet::new(n); n],
            in_adj: vec![BitSet::new(n); n],
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut d = Digraph::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    d.add_edge(u, v);
                }
            }
        }
        d
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut d = Digraph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::input(format!("bad edge ({u},{v}) for n={n}")));
            }
            d.add_edge(u, v);
        }
        Ok(d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Adds `u -> v`; returns whether it was new. Self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.out_adj[u].insert(v) {
            return false;
        }
        self.in_adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.out_adj[u].remove(v) {
            return false;
        }
        self.in_adj[v].remove(u);
        self.m -= 1;
        true
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].contains(v)
    }

    #[inline]
    pub fn out_adj(&self, v: usize) -> &BitSet {
        &self.out_adj[v]
    }

    #[inline]
    pub fn in_adj(&self, v: usize) -> &BitSet {
        &self.in_adj[v]
    }

    #[inline]
    pub fn adj(&self, v: usize, sign: Sign) -> &BitSet {
        match sign {
            Sign::Out => &self.out_adj[v],
            Sign::In => &self.in_adj[v],
        }
    }

    /// `|N^sign(v) ∩ within|`.
    pub fn degree(&self, v: usize, sign: Sign, within: Option<&BitSet>) -> Result<usize> {
        if v >= self.n {
            return Err(Error::input(format!("vertex {v} out of range (n={})", self.n)));
        }
        Ok(self.deg(v, sign, within))
    }

    /// Unchecked variant of [`Digraph::degree`].
    #[inline]
    pub fn deg(&self, v: usize, sign: Sign, within: Option<&BitSet>) -> usize {
        let row = self.adj(v, sign);
        match within {
            Some(w) => row.intersection_count(w),
            None => row.count(),
        }
    }

    pub fn min_degree(&self, sign: Sign) -> usize {
        (0..self.n).map(|v| self.deg(v, sign, None)).min().unwrap_or(0)
    }

    pub fn max_degree(&self, sign: Sign) -> usize {
        (0..self.n).map(|v| self.deg(v, sign, None)).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.out_adj[u].iter() {
                e.push((u, v));
            }
        }
        e
    }

    pub fn underlying(&self) -> UGraph {
        let mut g = UGraph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        g
    }

    pub fn union(&self, other: &Digraph) -> Digraph {
        assert_eq!(self.n, other.n);
        let mut d = self.clone();
        for (u, v) in other.edges() {
            d.add_edge(u, v);
        }
        d
    }

    pub fn is_complete(&self) -> bool {
        self.m == self.n * self.n.saturating_sub(1)
    }

    /// Subdigraph induced by `verts`, relabelled in increasing order.
    pub fn induced(&self, verts: &[usize]) -> Digraph {
        let mut idx = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            idx[v] = i;
        }
        let mut d = Digraph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for v in self.out_adj[u].iter() {
                if idx[v] != usize::MAX {
                    d.add_edge(i, idx[v]);
                }
            }
        }
        d
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let (n, undirected, edges) = parse_edges(text)?;
        if undirected {
            return Err(Error::input("expected a directed edge list"));
        }
        Digraph::from_edges(n, &edges)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UGraph {
    n: usize,
    adj: Vec<BitSet>,
    m: usize,
}

impl UGraph {
    pub fn new(n: usize) -> Self {
        UGraph {
            n,
            adj: vec![BitSet::new(n); n],
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = UGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = UGraph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::input(format!("bad edge ({u},{v}) for n={n}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.adj[u].insert(v) {
            return false;
        }
        self.adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.adj[u].remove(v) {
            return false;
        }
        self.adj[v].remove(u);
        self.m -= 1;
        true
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn adj(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    #[inline]
    pub fn deg(&self, v: usize, within: Option<&BitSet>) -> usize {
        match within {
            Some(w) => self.adj[v].intersection_count(w),
            None => self.adj[v].count(),
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if u < v {
                    e.push((u, v));
                }
            }
        }
        e
    }

    /// `N(A) = (⋃_{a∈A} N(a)) ∖ A`.
    pub fn neighbourhood(&self, set: &BitSet) -> BitSet {
        let mut nb = BitSet::new(self.n);
        for a in set.iter() {
            nb.union_with(&self.adj[a]);
        }
        nb.difference_with(set);
        nb
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for w in self.adj[u].iter() {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn union(&self, other: &UGraph) -> UGraph {
        assert_eq!(self.n, other.n);
        let mut g = self.clone();
        for (u, v) in other.edges() {
            g.add_edge(u, v);
        }
        g
    }

    /// Subgraph induced by `verts`, relabelled in the given order.
    pub fn induced(&self, verts: &[usize]) -> UGraph {
        let mut idx = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            idx[v] = i;
        }
        let mut g = UGraph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for v in self.adj[u].iter() {
                if idx[v] != usize::MAX && i < idx[v] {
                    g.add_edge(i, idx[v]);
                }
            }
        }
        g
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {} u\n", self.n, self.m);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let (n, undirected, edges) = parse_edges(text)?;
        if !undirected {
            return Err(Error::input("expected an undirected edge list (header token 'u')"));
        }
        UGraph::from_edges(n, &edges)
    }
}

/// Replaces each edge by a directed edge in each direction.
pub fn biorient(g: &UGraph) -> Digraph {
    let mut d = Digraph::new(g.n());
    for (u, v) in g.edges() {
        d.add_edge(u, v);
        d.add_edge(v, u);
    }
    d
}

/// Either kind of graph read from an edge-list file.
#[derive(Clone, Debug)]
pub enum AnyGraph {
    Directed(Digraph),
    Undirected(UGraph),
}

impl AnyGraph {
    pub fn parse(text: &str) -> Result<Self> {
        let (n, undirected, edges) = parse_edges(text)?;
        Ok(if undirected {
            AnyGraph::Undirected(UGraph::from_edges(n, &edges)?)
        } else {
            AnyGraph::Directed(Digraph::from_edges(n, &edges)?)
        })
    }

    /// Undirected graphs are read as their bi-orientation.
    pub fn into_digraph(self) -> Digraph {
        match self {
            AnyGraph::Directed(d) => d,
            AnyGraph::Undirected(g) => biorient(&g),
        }
    }
}

fn parse_edges(text: &str) -> Result<(usize, bool, Vec<(usize, usize)>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::input("empty edge list"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let undirected = match toks.len() {
        2 => false,
        3 if toks[2] == "u" => true,
        _ => return Err(Error::input(format!("bad header line: {header:?}"))),
    };
    let num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::input(format!("not a number: {t:?}")))
    };
    let n = num(toks[0])?;
    let m = num(toks[1])?;
    let mut edges = Vec::with_capacity(m);
    for l in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            return Err(Error::input(format!("bad edge line: {l:?}")));
        }
        edges.push((num(t[0])?, num(t[1])?));
    }
    if edges.len() != m {
        return Err(Error::input(format!("header says {m} edges, found {}", edges.len())));
    }
    Ok((n, undirected, edges))
}
