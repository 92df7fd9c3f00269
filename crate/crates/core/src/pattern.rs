//! Oriented cycle patterns.
//!
//! `bits[k]` is `true` when the edge between positions `k` and `k+1 (mod n)` points
//! forward, i.e. from position `k` to position `k+1`.

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::seq::index::sample;
use rand::Rng;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct OrientationPattern {
    bits: Vec<bool>,
}

impl OrientationPattern {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() < 3 {
            return Err(Error::input(format!("pattern length {} < 3", bits.len())));
        }
        Ok(OrientationPattern { bits })
    }

    pub fn directed(n: usize) -> Result<Self> {
        Self::new(vec![true; n])
    }

    pub fn anti_directed(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::input(format!("anti-directed cycle needs even n, got {n}")));
        }
        Self::new((0..n).map(|k| k % 2 == 0).collect())
    }

    /// Uniformly random pattern with exactly `lambda` cyclic direction changes.
    pub fn random_with_changes<R: Rng>(n: usize, lambda: usize, rng: &mut R) -> Result<Self> {
        if lambda % 2 == 1 || lambda > n {
            return Err(Error::input(format!(
                "direction changes must be even and at most n (n={n}, λ={lambda})"
            )));
        }
        let mut change = vec![false; n];
        for k in sample(rng, n, lambda).iter() {
            change[k] = true;
        }
        let mut cur: bool = rng.gen();
        let mut bits = Vec::with_capacity(n);
        for &c in &change {
            // a change at position k means σ_{k-1} ≠ σ_k
            if c {
                cur = !cur;
            }
            bits.push(cur);
        }
        Self::new(bits)
    }

    /// Pattern from the low `n` bits of `mask` (bit k set ⇔ forward).
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        Self::new((0..n).map(|k| mask >> k & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        assert!(self.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (k, &b)| m | ((b as u64) << k))
    }

    /// Parses a line of `+`/`-` (the Unicode minus is accepted too) or a shorthand
    /// `directed:n`, `anti:n`, `random:n:λ:seed`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::input(format!("bad number {t:?} in pattern {spec:?}")))
        };
        match parts.as_slice() {
            ["directed", n] => Self::directed(num(n)? as usize),
            ["anti", n] => Self::anti_directed(num(n)? as usize),
            ["random", n, l, seed] => {
                let mut rng = stream_rng(num(seed)?, 0);
                Self::random_with_changes(num(n)? as usize, num(l)? as usize, &mut rng)
            }
            [_] => {
                let bits = spec
                    .chars()
                    .map(|c| match c {
                        '+' => Ok(true),
                        '-' | '−' => Ok(false),
                        _ => Err(Error::input(format!("bad pattern character {c:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(bits)
            }
            _ => Err(Error::input(format!("unrecognised pattern {spec:?}"))),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Orientation of the edge between `k` and `k+1`, indices taken mod n.
    #[inline]
    pub fn forward(&self, k: usize) -> bool {
        self.bits[k % self.bits.len()]
    }

    /// Out-degree (0, 1 or 2) of position `k` in the pattern.
    pub fn out_degree(&self, k: usize) -> usize {
        let n = self.len();
        let k = k % n;
        self.bits[k] as usize + (!self.bits[(k + n - 1) % n]) as usize
    }

    /// Number of positions with in- or out-degree 0.
    pub fn lambda(&self) -> usize {
        let n = self.len();
        (0..n).filter(|&k| self.bits[(k + n - 1) % n] != self.bits[k]).count()
    }

    pub fn direction_changes(&self) -> usize {
        self.lambda()
    }

    pub fn out_degree_profile(&self) -> (usize, usize, usize) {
        let mut c = [0usize; 3];
        for k in 0..self.len() {
            c[self.out_degree(k)] += 1;
        }
        (c[0], c[1], c[2])
    }

    /// Containment threshold `p_C` for this pattern at its own length.
    pub fn p_threshold(&self) -> f64 {
        p_threshold(self.len(), self.lambda())
    }

    /// Same cycle read from position `r` onwards.
    pub fn rotate(&self, r: usize) -> Self {
        let n = self.len();
        OrientationPattern {
            bits: (0..n).map(|k| self.bits[(k + r) % n]).collect(),
        }
    }

    /// Same cycle traversed backwards, edge orientations complemented.
    pub fn reverse_complement(&self) -> Self {
        let n = self.len();
        OrientationPattern {
            bits: (0..n).map(|k| !self.bits[n - 1 - k]).collect(),
        }
    }

    /// Lexicographically least member of the rotation / reversal class.
    pub fn canonical(&self) -> Self {
        let rc = self.reverse_complement();
        (0..self.len())
            .flat_map(|r| [self.rotate(r), rc.rotate(r)])
            .min()
            .unwrap()
    }

    pub fn is_directed(&self) -> bool {
        self.lambda() == 0
    }
}

impl fmt::Display for OrientationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// `ln n / n` when there are no direction changes, otherwise
/// `max{ln n, 2(ln n − ln λ)} / 2n`.
pub fn p_threshold(n: usize, lambda: usize) -> f64 {
    let ln = (n as f64).ln();
    if lambda == 0 {
        ln / n as f64
    } else {
        ln.max(2.0 * (ln - (lambda as f64).ln())) / (2.0 * n as f64)
    }
}

/// Canonical mask of every pattern mask of length `n` (`n ≤ 20`).
pub fn canonical_table(n: usize) -> Vec<u32> {
    assert!(n <= 20);
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let rot = |m: u32, r: usize| -> u32 {
        if r == 0 {
            m
        } else {
            ((m >> r) | (m << (n - r))) & full
        }
    };
    // lexicographic order on bit sequences σ0σ1… with '-' < '+' equals order on the
    // bit-reversed mask; we compare via that key.
    let key = |m: u32| -> u32 { m.reverse_bits() >> (32 - n) };
    let revc = |m: u32| -> u32 {
        let mut out = 0u32;
        for k in 0..n {
            if m >> (n - 1 - k) & 1 == 0 {
                out |= 1 << k;
            }
        }
        out
    };
    (0..(1u32 << n))
        .map(|m| {
            let rc = revc(m);
            let mut best = m;
            for r in 0..n {
                for c in [rot(m, r), rot(rc, r)] {
                    if key(c) < key(best) {
                        best = c;
                    }
                }
            }
            best
        })
        .collect()
}

/// One representative (the canonical one) per class, in increasing lexicographic order.
pub fn canonical_classes(n: usize) -> Vec<OrientationPattern> {
    let table = canonical_table(n);
    let mut out: Vec<OrientationPattern> = (0..table.len())
        .filter(|&m| table[m] as usize == m)
        .map(|m| OrientationPattern::from_mask(n, m as u64).unwrap())
        .collect();
    out.sort();
    out
}
