//! Window and landmark selection on a pattern: a short arc `P` of the cycle with
//! `μ_j` positions of out-degree `j`, all pairwise far apart along `P`.

use crate::error::{Error, Result};
use crate::pattern::OrientationPattern;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LandmarkSelection {
    /// First position of the window; the window covers `start ..= start + len (mod n)`.
    pub start: usize,
    /// Window length in edges.
    pub len: usize,
    /// `z[j]` holds pattern positions of out-degree `j`.
    pub z: [Vec<usize>; 3],
    pub spacing: usize,
}

impl LandmarkSelection {
    /// Offset of `pos` from the window start, if inside.
    pub fn offset(&self, n: usize, pos: usize) -> Option<usize> {
        let o = (pos + n - self.start % n) % n;
        (o <= self.len).then_some(o)
    }

    pub fn validate(&self, c: &OrientationPattern, max_len: usize, mu: [usize; 3]) -> Result<()> {
        let n = c.len();
        if self.len > max_len || self.len >= n {
            return Err(Error::input(format!("window length {} too long", self.len)));
        }
        let mut offs = Vec::new();
        for j in 0..3 {
            if self.z[j].len() != mu[j] {
                return Err(Error::input(format!("|Z{j}| = {} ≠ {}", self.z[j].len(), mu[j])));
            }
            for &p in &self.z[j] {
                if c.out_degree(p) != j {
                    return Err(Error::input(format!("position {p} is not of out-degree {j}")));
                }
                offs.push(
                    self.offset(n, p)
                        .ok_or_else(|| Error::input(format!("position {p} outside window")))?,
                );
            }
        }
        offs.sort_unstable();
        if offs.windows(2).any(|w| w[1] - w[0] < self.spacing) {
            return Err(Error::input("landmarks closer than the spacing"));
        }
        Ok(())
    }
}

/// `(μ₀+μ₂, μ₁) = (⌈2λ/ln n⌉, ⌈(n−2λ)/ln n⌉)` with `λ` the number of out-degree-0 positions.
pub fn default_mus(c: &OrientationPattern) -> Result<(usize, usize)> {
    let n = c.len();
    if n < 16 {
        return Err(Error::input(format!(
            "default landmark counts refuse n < 16 (n={n}); pass them explicitly"
        )));
    }
    let ln = (n as f64).ln();
    let sinks = c.out_degree_profile().0;
    Ok((
        (2.0 * sinks as f64 / ln).ceil() as usize,
        ((n - 2 * sinks) as f64 / ln).ceil() as usize,
    ))
}

/// `⌈factor · ln n / ln ln n⌉`.
pub fn default_spacing(n: usize, factor: f64) -> usize {
    let ln = (n as f64).ln();
    (factor * ln / ln.ln()).ceil().max(1.0) as usize
}

pub fn select_landmarks(
    c: &OrientationPattern,
    mu: [usize; 3],
    spacing: usize,
    window_len: usize,
) -> Result<LandmarkSelection> {
    let n = c.len();
    let spacing = spacing.max(1);
    let len = window_len.min(n - 1);
    let (count0, _, _) = c.out_degree_profile();
    let class: Vec<usize> = (0..n).map(|k| c.out_degree(k)).collect();
    let total: usize = mu.iter().sum();
    if total > 0 && (total - 1) * spacing > len {
        return Err(Error::SelectionInfeasible {
            case: "length".into(),
            detail: format!(
                "{total} landmarks at spacing {spacing} need a window of {} edges, have {len}",
                (total - 1) * spacing
            ),
        });
    }
    // balance score of each window start: ((n-2λ)/n)(ℓ+1) − |P_s ∩ X₁|
    let target = (n - 2 * count0) as f64 / n as f64 * (len + 1) as f64;
    let mut ones = (0..=len).filter(|&o| class[o % n] == 1).count();
    let mut scored = Vec::with_capacity(n);
    for s in 0..n {
        scored.push(((target - ones as f64).abs(), s));
        ones -= (class[s] == 1) as usize;
        ones += (class[(s + len + 1) % n] == 1) as usize;
    }
    scored.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let case_one = mu[0] + mu[2] <= mu[1];
    let mut best_fill = (0usize, 0usize);
    for &(_, s) in &scored {
        let mut picked: Vec<usize> = Vec::new();
        let mut z: [Vec<usize>; 3] = Default::default();
        let phases: [&[usize]; 2] = if case_one { [&[0, 2], &[1]] } else { [&[1], &[0, 2]] };
        for wanted in phases {
            for o in 0..=len {
                let pos = (s + o) % n;
                let j = class[pos];
                if !wanted.contains(&j) || z[j].len() >= mu[j] {
                    continue;
                }
                let at = picked.partition_point(|&q| q < o);
                let left_ok = at == 0 || o - picked[at - 1] >= spacing;
                let right_ok = at == picked.len() || picked[at] - o >= spacing;
                if left_ok && right_ok {
                    picked.insert(at, o);
                    z[j].push(pos);
                }
            }
        }
        let filled: usize = z.iter().map(Vec::len).sum();
        if filled == total {
            return Ok(LandmarkSelection {
                start: s,
                len,
                z,
                spacing,
            });
        }
        if filled > best_fill.0 {
            best_fill = (filled, s);
        }
    }
    Err(Error::SelectionInfeasible {
        case: if case_one { "I" } else { "II" }.into(),
        detail: format!(
            "best window (start {}) fits {} of {total} landmarks (μ = {mu:?}, spacing {spacing}, window {len})",
            best_fill.1, best_fill.0
        ),
    })
}
