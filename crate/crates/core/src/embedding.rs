//! Position→vertex maps witnessing a copy of a pattern, and their validity checker.

use crate::graph::Digraph;
use crate::pattern::OrientationPattern;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub pattern_len: usize,
    pub map: Vec<usize>,
    pub pins: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Length { expected: usize, got: usize },
    NotInjective { vertex: usize },
    VertexOutOfRange { vertex: usize },
    MissingEdge { position: usize, from: usize, to: usize },
    Pin { position: usize, expected: usize, got: usize },
}

impl Embedding {
    pub fn new(map: Vec<usize>, pins: Vec<(usize, usize)>) -> Self {
        Embedding {
            pattern_len: map.len(),
            map,
            pins,
        }
    }

    /// Checks every pattern edge against `d`, injectivity, and pins.
    pub fn validate(&self, d: &Digraph, c: &OrientationPattern) -> Result<(), Violation> {
        let n = c.len();
        if self.map.len() != n || self.pattern_len != n {
            return Err(Violation::Length {
                expected: n,
                got: self.map.len(),
            });
        }
        let mut seen = vec![false; d.n()];
        for &v in &self.map {
            if v >= d.n() {
                return Err(Violation::VertexOutOfRange { vertex: v });
            }
            if seen[v] {
                return Err(Violation::NotInjective { vertex: v });
            }
            seen[v] = true;
        }
        for k in 0..n {
            let (a, b) = (self.map[k], self.map[(k + 1) % n]);
            let (from, to) = if c.forward(k) { (a, b) } else { (b, a) };
            if !d.has_edge(from, to) {
                return Err(Violation::MissingEdge { position: k, from, to });
            }
        }
        for &(pos, v) in &self.pins {
            if self.map.get(pos) != Some(&v) {
                return Err(Violation::Pin {
                    position: pos,
                    expected: v,
                    got: self.map.get(pos).copied().unwrap_or(usize::MAX),
                });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, d: &Digraph, c: &OrientationPattern) -> bool {
        self.validate(d, c).is_ok()
    }

    /// `pos vertex` lines.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.map.iter().enumerate() {
            let _ = writeln!(s, "{k} {v}");
        }
        s
    }
}

/// Checks that `verts[t]` realises pattern position `start + t` along a path slice.
pub fn validate_path_slice(
    d: &Digraph,
    c: &OrientationPattern,
    start: usize,
    verts: &[usize],
) -> Result<(), Violation> {
    for t in 0..verts.len().saturating_sub(1) {
        let (a, b) = (verts[t], verts[t + 1]);
        let pos = (start + t) % c.len();
        let (from, to) = if c.forward(pos) { (a, b) } else { (b, a) };
        if !d.has_edge(from, to) {
            return Err(Violation::MissingEdge {
                position: pos,
                from,
                to,
            });
        }
    }
    let mut s = verts.to_vec();
    s.sort_unstable();
    if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
        return Err(Violation::NotInjective { vertex: w[0] });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checker_accepts_and_rejects() {
        let tri = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = OrientationPattern::directed(3).unwrap();
        assert!(Embedding::new(vec![0, 1, 2], vec![(0, 0)]).is_valid(&tri, &c));
        assert!(matches!(
            Embedding::new(vec![0, 2, 1], vec![]).validate(&tri, &c),
            Err(Violation::MissingEdge { .. })
        ));
        assert!(matches!(
            Embedding::new(vec![0, 0, 1], vec![]).validate(&tri, &c),
            Err(Violation::NotInjective { vertex: 0 })
        ));
        assert!(matches!(
            Embedding::new(vec![1, 2, 0], vec![(0, 0)]).validate(&tri, &c),
            Err(Violation::Pin { .. })
        ));
    }
}
