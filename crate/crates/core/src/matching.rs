//! Bipartite matching where every left vertex demands a fixed number of partners.

/// Result of a demand matching: `assign[l]` lists the right partners of left vertex `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemandMatching {
    Complete(Vec<Vec<usize>>),
    /// Left vertices `U` with `|N(U)| < demand·|U|`.
    Deficient(Vec<usize>),
}

/// Splits each left vertex into `demand` copies and runs augmenting-path matching.
/// Adjacency order is the preference order: earlier right vertices are tried first.
pub fn demand_matching(adj: &[Vec<usize>], n_right: usize, demand: usize) -> DemandMatching {
    let copies = adj.len() * demand;
    let mut match_left = vec![usize::MAX; copies];
    let mut match_right = vec![usize::MAX; n_right];
    for c in 0..copies {
        let mut seen = vec![false; n_right];
        if !augment(c, demand, adj, &mut match_left, &mut match_right, &mut seen) {
            return DemandMatching::Deficient(deficient_set(c, demand, adj, &match_right));
        }
    }
    let mut assign = vec![Vec::with_capacity(demand); adj.len()];
    for (c, &r) in match_left.iter().enumerate() {
        assign[c / demand].push(r);
    }
    DemandMatching::Complete(assign)
}

fn augment(
    c: usize,
    demand: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    seen: &mut [bool],
) -> bool {
    if let Some(&r) = adj[c / demand].iter().find(|&&r| !seen[r] && match_right[r] == usize::MAX) {
        match_left[c] = r;
        match_right[r] = c;
        return true;
    }
    for &r in &adj[c / demand] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let other = match_right[r];
        if other == usize::MAX || augment(other, demand, adj, match_left, match_right, seen) {
            match_left[c] = r;
            match_right[r] = c;
            return true;
        }
    }
    false
}

/// Left vertices reachable from the unmatched copy `c` by alternating paths.
fn deficient_set(c: usize, demand: usize, adj: &[Vec<usize>], match_right: &[usize]) -> Vec<usize> {
    let mut left_seen = vec![false; adj.len()];
    let mut right_seen = vec![false; match_right.len()];
    let mut stack = vec![c / demand];
    left_seen[c / demand] = true;
    while let Some(l) = stack.pop() {
        for &r in &adj[l] {
            if right_seen[r] {
                continue;
            }
            right_seen[r] = true;
            let m = match_right[r];
            if m != usize::MAX && !left_seen[m / demand] {
                left_seen[m / demand] = true;
                stack.push(m / demand);
            }
        }
    }
    (0..adj.len()).filter(|&l| left_seen[l]).collect()
}
