//! Covering `X ∪ B` with short pattern slices whose endpoints land in `A⁺ ∪ A⁻`.

use crate::bitset::BitSet;
use crate::embedding::validate_path_slice;
use crate::error::{Error, Result};
use crate::graph::{Digraph, Sign};
use crate::matching::{demand_matching, DemandMatching};
use crate::pattern::OrientationPattern;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct CoverInstance<'a> {
    pub d: &'a Digraph,
    pub pattern: &'a OrientationPattern,
    pub x: Vec<usize>,
    pub b_plus: Vec<usize>,
    pub b_minus: Vec<usize>,
    pub a_plus: Vec<usize>,
    pub a_minus: Vec<usize>,
    /// `(v, position)`: the slot midpoint assigned to each `v ∈ X ∪ B`.
    pub centers: Vec<(usize, usize)>,
    /// Slots are the positions `c − h ..= c + h`.
    pub half_len: usize,
    pub degree: f64,
    pub level_budget: usize,
}

impl CoverInstance<'_> {
    fn n(&self) -> usize {
        self.d.n()
    }

    fn set(&self, v: &[usize]) -> BitSet {
        BitSet::from_iter(self.n(), v.iter().copied())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.pattern.len() != n {
            return Err(Error::input("pattern length differs from n"));
        }
        let mut seen = BitSet::new(n);
        for part in [&self.x, &self.b_plus, &self.b_minus, &self.a_plus, &self.a_minus] {
            for &v in part.iter() {
                if v >= n || !seen.insert(v) {
                    return Err(Error::input(format!("vertex {v} repeated across cover sets or out of range")));
                }
            }
        }
        let mut targets: Vec<usize> = self.x.iter().chain(&self.b_plus).chain(&self.b_minus).copied().collect();
        targets.sort_unstable();
        let mut centred: Vec<usize> = self.centers.iter().map(|c| c.0).collect();
        centred.sort_unstable();
        if targets != centred {
            return Err(Error::input("centres must biject onto X ∪ B"));
        }
        let h = self.half_len;
        if !self.centers.is_empty() && self.centers.len() * (2 * h + 1) > n {
            return Err(Error::input("slots do not fit in the pattern"));
        }
        let mut used = BitSet::new(n);
        for &(_, c) in &self.centers {
            for t in 0..=2 * h {
                if !used.insert((c + n - h + t) % n) {
                    return Err(Error::input(format!("slot around position {c} overlaps another")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hierarchy {
    pub r: usize,
    /// `plus[i]` and `minus[i]` are `B_i⁺` and `B_i⁻` as sorted vertex lists.
    pub plus: Vec<Vec<usize>>,
    pub minus: Vec<Vec<usize>>,
    /// First level containing each B vertex (`usize::MAX` elsewhere).
    pub first_level: Vec<usize>,
    pub x_members: Vec<usize>,
}

impl Hierarchy {
    /// `i_v`: `r` on X, one less than the first level on B, `None` elsewhere.
    pub fn index(&self, v: usize) -> Option<usize> {
        if self.x_members.binary_search(&v).is_ok() {
            Some(self.r)
        } else if self.first_level[v] != usize::MAX {
            Some(self.first_level[v] - 1)
        } else {
            None
        }
    }
}

pub fn build_hierarchy(inst: &CoverInstance) -> Result<Hierarchy> {
    inst.validate()?;
    let n = inst.n();
    let a_plus = inst.set(&inst.a_plus);
    let a_minus = inst.set(&inst.a_minus);
    let mut plus = vec![BitSet::new(n)];
    let mut minus = vec![BitSet::new(n)];
    let mut first_level = vec![usize::MAX; n];
    let total = inst.b_plus.len() + inst.b_minus.len();
    let mut x_members = inst.x.clone();
    x_members.sort_unstable();
    let mut covered = 0;
    let mut i = 0;
    while covered < total {
        if i >= inst.level_budget {
            break;
        }
        i += 1;
        let mut tp = plus[i - 1].clone();
        tp.union_with(&a_plus);
        let mut tm = minus[i - 1].clone();
        tm.union_with(&a_minus);
        let good = |v: usize| {
            inst.d.deg(v, Sign::Out, Some(&tp)) as f64 >= inst.degree
                && inst.d.deg(v, Sign::In, Some(&tm)) as f64 >= inst.degree
        };
        let np = BitSet::from_iter(n, inst.b_plus.iter().copied().filter(|&v| good(v)));
        let nm = BitSet::from_iter(n, inst.b_minus.iter().copied().filter(|&v| good(v)));
        let stalled = np == plus[i - 1] && nm == minus[i - 1];
        for v in np.iter().chain(nm.iter()) {
            if first_level[v] == usize::MAX {
                first_level[v] = i;
            }
        }
        covered = np.count() + nm.count();
        plus.push(np);
        minus.push(nm);
        if stalled {
            break;
        }
    }
    if covered < total {
        let mut left: Vec<usize> = inst
            .b_plus
            .iter()
            .chain(&inst.b_minus)
            .copied()
            .filter(|&v| first_level[v] == usize::MAX)
            .collect();
        left.sort_unstable();
        return Err(Error::Hierarchy(left));
    }
    Ok(Hierarchy {
        r: plus.len() - 1,
        plus: plus.iter().map(|s| s.to_vec()).collect(),
        minus: minus.iter().map(|s| s.to_vec()).collect(),
        first_level,
        x_members,
    })
}

/// Pair of distinct images per vertex of `X ∪ B`, all images distinct across vertices.
pub type DoubleMatching = Vec<Option<[usize; 2]>>;

/// The neighbours `y` of `x` in the auxiliary graph `H^⋄`, A-vertices first.
pub fn auxiliary_neighbours(inst: &CoverInstance, hier: &Hierarchy, sign: Sign, x: usize) -> Vec<usize> {
    let (a, b) = match sign {
        Sign::Out => (&inst.a_plus, &inst.b_plus),
        Sign::In => (&inst.a_minus, &inst.b_minus),
    };
    let nb = inst.d.adj(x, sign);
    let lx = if hier.x_members.binary_search(&x).is_ok() { usize::MAX } else { hier.first_level[x] };
    let mut out: Vec<usize> = a.iter().copied().filter(|&y| nb.contains(y)).collect();
    out.sort_unstable();
    let mut bs: Vec<usize> = b
        .iter()
        .copied()
        .filter(|&y| nb.contains(y) && (lx == usize::MAX || hier.first_level[y] < lx))
        .collect();
    bs.sort_unstable_by_key(|&y| (hier.first_level[y], y));
    out.extend(bs);
    out
}

pub fn hall_double_matching(inst: &CoverInstance, hier: &Hierarchy, sign: Sign) -> Result<DoubleMatching> {
    let n = inst.n();
    let left: Vec<usize> = inst.x.iter().chain(&inst.b_plus).chain(&inst.b_minus).copied().collect();
    let mut right_index = vec![usize::MAX; n];
    let mut right = Vec::new();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&x| {
            auxiliary_neighbours(inst, hier, sign, x)
                .into_iter()
                .map(|y| {
                    if right_index[y] == usize::MAX {
                        right_index[y] = right.len();
                        right.push(y);
                    }
                    right_index[y]
                })
                .collect()
        })
        .collect();
    match demand_matching(&adj, right.len(), 2) {
        DemandMatching::Complete(assign) => {
            let mut g = vec![None; n];
            for (i, &x) in left.iter().enumerate() {
                g[x] = Some([right[assign[i][0]], right[assign[i][1]]]);
            }
            Ok(g)
        }
        DemandMatching::Deficient(u) => {
            let mut w: Vec<usize> = u.into_iter().map(|i| left[i]).collect();
            w.sort_unstable();
            Err(Error::Hall(w))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverPath {
    pub center: usize,
    pub center_pos: usize,
    /// Pattern position of `vertices[0]`.
    pub start_pos: usize,
    pub vertices: Vec<usize>,
}

impl CoverPath {
    pub fn end_pos(&self, n: usize) -> usize {
        (self.start_pos + self.vertices.len() - 1) % n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    /// Selected paths, one per element of `X ∪ B̄`, ordered by `start_pos`.
    pub paths: Vec<CoverPath>,
    pub selected: Vec<usize>,
}

pub fn build_cover_paths(
    inst: &CoverInstance,
    hier: &Hierarchy,
    g_plus: &DoubleMatching,
    g_minus: &DoubleMatching,
) -> Result<Cover> {
    let n = inst.n();
    let mut in_a = inst.set(&inst.a_plus);
    in_a.union_with(&inst.set(&inst.a_minus));
    let mut targets = inst.set(&inst.x);
    targets.union_with(&inst.set(&inst.b_plus));
    targets.union_with(&inst.set(&inst.b_minus));
    let h = inst.half_len;
    let mut all: Vec<Option<CoverPath>> = vec![None; n];
    for &(v, c) in &inst.centers {
        let mut on = BitSet::from_iter(n, [v]);
        let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (side, dir) in [(0usize, 1isize), (1, -1)] {
            let mut u = v;
            let mut pos = c;
            for step in 0..=h {
                if u != v && in_a.contains(u) {
                    break;
                }
                if step == h {
                    return Err(Error::Cover {
                        vertex: v,
                        detail: format!("slot exhausted with {u} still in X ∪ B"),
                    });
                }
                let sign = if dir == 1 {
                    if inst.pattern.forward(pos) { Sign::Out } else { Sign::In }
                } else {
                    let prev = (pos + n - 1) % n;
                    if inst.pattern.forward(prev) { Sign::In } else { Sign::Out }
                };
                let g = if sign == Sign::Out { g_plus } else { g_minus };
                let imgs = g[u].ok_or_else(|| Error::Cover { vertex: v, detail: format!("{u} has no images") })?;
                let Some(&w) = imgs.iter().find(|&&w| !on.contains(w)) else {
                    return Err(Error::Cover { vertex: v, detail: format!("both images of {u} already used") });
                };
                on.insert(w);
                sides[side].push(w);
                u = w;
                pos = if dir == 1 { (pos + 1) % n } else { (pos + n - 1) % n };
            }
        }
        let [right, left] = sides;
        let mut vertices: Vec<usize> = left.iter().rev().copied().collect();
        vertices.push(v);
        vertices.extend(right);
        all[v] = Some(CoverPath { center: v, center_pos: c, start_pos: (c + n - left.len()) % n, vertices });
    }
    let mut selected: Vec<usize> = inst.x.clone();
    let mut used = BitSet::new(n);
    for &v in &inst.x {
        for &w in &all[v].as_ref().unwrap().vertices {
            used.insert(w);
        }
    }
    for i in (1..=hier.r).rev() {
        let mut layer: Vec<usize> = inst
            .b_plus
            .iter()
            .chain(&inst.b_minus)
            .copied()
            .filter(|&v| hier.first_level[v] == i && !used.contains(v))
            .collect();
        layer.sort_unstable();
        for &v in &layer {
            for &w in &all[v].as_ref().unwrap().vertices {
                used.insert(w);
            }
        }
        selected.extend(layer);
    }
    let mut seen = BitSet::new(n);
    let mut paths = Vec::with_capacity(selected.len());
    for &v in &selected {
        let p = all[v].take().unwrap();
        for &w in &p.vertices {
            if !seen.insert(w) {
                return Err(Error::Cover { vertex: v, detail: format!("path meets another selected path at {w}") });
            }
        }
        paths.push(p);
    }
    if let Some(v) = targets.iter().find(|&v| !seen.contains(v)) {
        return Err(Error::Cover { vertex: v, detail: "left uncovered".into() });
    }
    paths.sort_by_key(|p| p.start_pos);
    selected.sort_unstable();
    Ok(Cover { paths, selected })
}

/// Checks the structural guarantees of a cover; returns the first offending centre.
pub fn check_cover(inst: &CoverInstance, hier: &Hierarchy, cover: &Cover) -> std::result::Result<(), usize> {
    let n = inst.n();
    let mut in_a = inst.set(&inst.a_plus);
    in_a.union_with(&inst.set(&inst.a_minus));
    let mut seen = BitSet::new(n);
    for p in &cover.paths {
        let k = p.vertices.iter().position(|&w| w == p.center).ok_or(p.center)?;
        let ends = [p.vertices[0], *p.vertices.last().unwrap()];
        if ends.iter().any(|&e| !in_a.contains(e)) {
            return Err(p.center);
        }
        if p.vertices[1..p.vertices.len() - 1].iter().any(|&w| hier.index(w).is_none()) {
            return Err(p.center);
        }
        if validate_path_slice(inst.d, inst.pattern, p.start_pos, &p.vertices).is_err() {
            return Err(p.center);
        }
        // Level index strictly drops moving away from the centre on both sides.
        for side in [&p.vertices[..=k].iter().rev().copied().collect::<Vec<_>>(), &p.vertices[k..].to_vec()] {
            let levels: Vec<usize> = side.iter().map_while(|&w| hier.index(w)).collect();
            if levels.windows(2).any(|w| w[1] >= w[0]) {
                return Err(p.center);
            }
        }
        for &w in &p.vertices {
            if !seen.insert(w) {
                return Err(p.center);
            }
        }
    }
    let uncovered = inst.x.iter().chain(&inst.b_plus).chain(&inst.b_minus).find(|&&v| !seen.contains(v));
    match uncovered {
        Some(&v) => Err(v),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_exceptional_vertex() {
        // 0 → 1 → 2 with 1 exceptional; A⁺ = {2}, A⁻ = {0}.
        let mut d = Digraph::new(8);
        d.add_edge(0, 1);
        d.add_edge(1, 2);
        d.add_edge(3, 1);
        d.add_edge(1, 4);
        let c = OrientationPattern::directed(8).unwrap();
        let inst = CoverInstance {
            d: &d,
            pattern: &c,
            x: vec![1],
            b_plus: vec![],
            b_minus: vec![],
            a_plus: vec![2, 4],
            a_minus: vec![0, 3],
            centers: vec![(1, 4)],
            half_len: 2,
            degree: 1.0,
            level_budget: 4,
        };
        let hier = build_hierarchy(&inst).unwrap();
        assert_eq!(hier.r, 0);
        let gp = hall_double_matching(&inst, &hier, Sign::Out).unwrap();
        let gm = hall_double_matching(&inst, &hier, Sign::In).unwrap();
        assert_eq!(gp[1], Some([2, 4]));
        let cover = build_cover_paths(&inst, &hier, &gp, &gm).unwrap();
        assert_eq!(cover.paths[0].vertices, vec![0, 1, 2]);
        assert_eq!(cover.paths[0].start_pos, 3);
        assert!(check_cover(&inst, &hier, &cover).is_ok());
    }

    #[test]
    fn empty_instance() {
        let d = Digraph::complete(6);
        let c = OrientationPattern::directed(6).unwrap();
        let inst = CoverInstance {
            d: &d,
            pattern: &c,
            x: vec![],
            b_plus: vec![],
            b_minus: vec![],
            a_plus: vec![0, 1],
            a_minus: vec![2, 3],
            centers: vec![],
            half_len: 2,
            degree: 1.0,
            level_budget: 4,
        };
        let hier = build_hierarchy(&inst).unwrap();
        assert_eq!(hier.r, 0);
        let g = hall_double_matching(&inst, &hier, Sign::Out).unwrap();
        let cover = build_cover_paths(&inst, &hier, &g, &g).unwrap();
        assert!(cover.paths.is_empty());
    }
}
