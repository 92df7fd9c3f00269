//! Embedding an oriented spanning cycle into a pseudorandom digraph plus sprinkled edges:
//! partition, bad set, cover, connection, then rotation-extension to close the cycle.

use crate::badset::find_bad_set;
use crate::bitset::BitSet;
use crate::cover::{build_cover_paths, build_hierarchy, hall_double_matching, Cover, CoverInstance};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::extend::connect_pairs;
use crate::graph::{biorient, Digraph, Sign, UGraph};
use crate::models::sample_gnp;
use crate::params::PipelineParams;
use crate::pattern::OrientationPattern;
use crate::posa::posa_ham_path;
use crate::pseudo::partition_exceptional;
use crate::rng::StreamRng;
use rand::seq::SliceRandom;
use serde::Serialize;

/// The two sprinkled streams: `g1` is revealed at once, `stream2` one edge at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct Sprinkle {
    pub g1: UGraph,
    pub stream2: Vec<(usize, usize)>,
}

impl Sprinkle {
    /// Samples both streams; with `support`, edges touching vertices outside it are dropped.
    pub fn sample(n: usize, params: &PipelineParams, support: Option<&BitSet>, rng: &mut StreamRng) -> Result<Self> {
        let mut g1 = sample_gnp(n, params.q_connect(n), rng)?;
        let mut stream2 = sample_gnp(n, params.q_posa(n), rng)?.edges();
        stream2.shuffle(rng);
        if let Some(s) = support {
            for (u, v) in g1.edges() {
                if !s.contains(u) || !s.contains(v) {
                    g1.remove_edge(u, v);
                }
            }
            stream2.retain(|&(u, v)| s.contains(u) && s.contains(v));
        }
        Ok(Sprinkle { g1, stream2 })
    }
}

/// A window of the pattern: positions `start ..= start + len (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn offset(&self, n: usize, pos: usize) -> usize {
        (pos + n - self.start % n) % n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub n: usize,
    pub stages: Vec<StageRecord>,
    pub failed_stage: Option<String>,
    pub window_widened: bool,
    pub bad_set: Vec<usize>,
    pub cover_paths: usize,
    /// Edges of the second stream read during the final stage.
    pub consumed_stream2: Vec<(usize, usize)>,
    pub params: PipelineParams,
}

impl StageReport {
    fn new(n: usize, params: &PipelineParams) -> Self {
        StageReport {
            n,
            stages: Vec::new(),
            failed_stage: None,
            window_widened: false,
            bad_set: Vec::new(),
            cover_paths: 0,
            consumed_stream2: Vec::new(),
            params: params.clone(),
        }
    }

    fn ok(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageRecord { stage: stage.into(), ok: true, detail: detail.into() });
    }

    fn fail(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageRecord { stage: stage.into(), ok: false, detail: detail.into() });
        self.failed_stage = Some(stage.into());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedOutcome {
    pub embedding: Option<Embedding>,
    pub report: StageReport,
}

/// `D₀ ∪ biorient(G₁) ∪ biorient(consumed part of stream 2)`.
pub fn host_digraph(d0: &Digraph, sprinkle: &Sprinkle, consumed: &[(usize, usize)]) -> Digraph {
    let mut g = sprinkle.g1.clone();
    for &(u, v) in consumed {
        g.add_edge(u, v);
    }
    d0.union(&biorient(&g))
}

fn stage_err(e: &Error) -> String {
    e.to_string()
}

/// Places slot centres for `count` bad vertices in the window around the fixed centres,
/// keeping gaps of at least `gap` between slots of half-length `h`.
fn place_slots(n: usize, fixed: &[usize], count: usize, h: usize, gap: usize, limit: usize) -> Option<Vec<usize>> {
    let mut taken: Vec<(usize, usize)> = fixed.iter().map(|&o| (o.saturating_sub(h), o + h)).collect();
    let mut out = Vec::with_capacity(count);
    let mut o = h;
    while out.len() < count {
        if o >= limit || o + h >= n {
            return None;
        }
        let (s, e) = (o - h, o + h);
        let clear = taken.iter().all(|&(ts, te)| e + gap <= ts || te + gap <= s);
        if clear {
            taken.push((s, e));
            out.push(o);
            o += 2 * h + gap;
        } else {
            o += 1;
        }
    }
    Some(out)
}

/// Runs the four stages; stage failures are reported, input problems are errors.
#[allow(clippy::too_many_arguments)]
pub fn embed_cycle(
    d0: &Digraph,
    x: &[usize],
    c: &OrientationPattern,
    window: Window,
    pins: &[(usize, usize)],
    sprinkle: &Sprinkle,
    params: &PipelineParams,
    rng: &mut StreamRng,
) -> Result<EmbedOutcome> {
    let n = d0.n();
    params.validate()?;
    if c.len() != n || sprinkle.g1.n() != n {
        return Err(Error::input("pattern, digraph and sprinkle sizes differ"));
    }
    let xs = BitSet::from_iter(n, x.iter().copied().filter(|&v| v < n));
    if x.iter().any(|&v| v >= n) || xs.count() != x.len() {
        return Err(Error::input("X must be a set of vertices of D₀"));
    }
    if window.len >= n {
        return Err(Error::input("window must be a proper arc of the pattern"));
    }
    let mut pin_of = vec![usize::MAX; n];
    let mut pos_used = BitSet::new(n);
    for &(pos, v) in pins {
        if pos >= n || v >= n || !xs.contains(v) || pin_of[v] != usize::MAX || !pos_used.insert(pos) {
            return Err(Error::input(format!("pin ({pos}, {v}) invalid: pins must map distinct positions to distinct X vertices")));
        }
        pin_of[v] = pos;
    }
    if let Some(&v) = x.iter().find(|&&v| pin_of[v] == usize::MAX) {
        return Err(Error::input(format!("exceptional vertex {v} has no pinned position")));
    }
    let mut x_offsets: Vec<usize> = Vec::new();
    for &(pos, _) in pins {
        let o = window.offset(n, pos);
        if o > window.len {
            return Err(Error::input(format!("pinned position {pos} lies outside the window")));
        }
        x_offsets.push(o);
    }
    x_offsets.sort_unstable();
    let spacing = params.spacing(n);
    if x_offsets.windows(2).any(|w| w[1] - w[0] < spacing) {
        return Err(Error::input(format!("pinned positions closer than spacing {spacing}")));
    }

    let mut report = StageReport::new(n, params);
    let done = |report: StageReport| Ok(EmbedOutcome { embedding: None, report });

    // Partition.
    let part = match partition_exceptional(d0, x, params, rng) {
        Ok(p) => p,
        Err(e) if e.is_input() => return Err(e),
        Err(e) => {
            report.fail("partition", stage_err(&e));
            return done(report);
        }
    };
    report.ok("partition", format!("{} resampling steps", part.iterations));

    // Step A: bad set in the first stream.
    let bad = match find_bad_set(&sprinkle.g1, &part.v0, params, rng) {
        Ok(b) => b,
        Err(e) => {
            report.fail("bad-set", stage_err(&e));
            return done(report);
        }
    };
    let bset = BitSet::from_iter(n, bad.b.iter().copied());
    report.bad_set = bad.b.clone();
    report.ok("bad-set", format!("|B| = {}", bad.b.len()));

    let in_v1 = BitSet::from_iter(n, part.v1.iter().copied());
    let in_v2 = BitSet::from_iter(n, part.v2.iter().copied());
    let mut b_plus = Vec::new();
    let mut b_minus = Vec::new();
    let mut spare = 0;
    for &v in &bad.b {
        if xs.contains(v) {
            continue;
        }
        if in_v1.contains(v) {
            b_plus.push(v);
        } else if in_v2.contains(v) {
            b_minus.push(v);
        } else {
            if spare % 2 == 0 { b_plus.push(v) } else { b_minus.push(v) }
            spare += 1;
        }
    }
    let a_plus: Vec<usize> = part.v1.iter().copied().filter(|v| !bset.contains(*v)).collect();
    let a_minus: Vec<usize> = part.v2.iter().copied().filter(|v| !bset.contains(*v)).collect();

    // Step B: cover X ∪ B with pattern slices in D₀.
    let h = params.cover_half_len(n);
    let gap = params.min_connect_len(n);
    let b_all: Vec<usize> = b_plus.iter().chain(&b_minus).copied().collect();
    let fixed: Vec<usize> = x_offsets.clone();
    let mut limit = window.len + 1;
    let slots = loop {
        if let Some(s) = place_slots(n, &fixed, b_all.len(), h, gap, limit) {
            break s;
        }
        if limit >= n {
            report.fail("cover", "no room for the bad-vertex slots");
            return done(report);
        }
        limit = (limit * 2).min(n);
        report.window_widened = true;
    };
    let mut centers: Vec<(usize, usize)> = pins.iter().map(|&(pos, v)| (v, pos)).collect();
    for (&v, &o) in b_all.iter().zip(&slots) {
        centers.push((v, (window.start + o) % n));
    }
    let inst = CoverInstance {
        d: d0,
        pattern: c,
        x: x.to_vec(),
        b_plus,
        b_minus,
        a_plus,
        a_minus,
        centers,
        half_len: h,
        degree: params.cover_degree(n),
        level_budget: params.hierarchy_budget(n),
    };
    if let Err(e) = inst.validate() {
        report.fail("cover", stage_err(&e));
        return done(report);
    }
    let cover: Cover = match build_hierarchy(&inst).and_then(|hier| {
        let gp = hall_double_matching(&inst, &hier, Sign::Out)?;
        let gm = hall_double_matching(&inst, &hier, Sign::In)?;
        build_cover_paths(&inst, &hier, &gp, &gm)
    }) {
        Ok(cv) => cv,
        Err(e) => {
            report.fail("cover", stage_err(&e));
            return done(report);
        }
    };
    report.cover_paths = cover.paths.len();
    report.ok("cover", format!("{} paths", cover.paths.len()));

    // Step C: connect consecutive cover paths through V₀ ∖ B in the first stream.
    let mut qs = cover.paths.clone();
    qs.sort_by_key(|q| window.offset(n, q.start_pos));
    let mut pairs = Vec::new();
    let mut lengths = Vec::new();
    for w in qs.windows(2) {
        let end = window.offset(n, w[0].end_pos(n));
        let start = window.offset(n, w[1].start_pos);
        pairs.push((*w[0].vertices.last().unwrap(), w[1].vertices[0]));
        lengths.push(start - end);
    }
    let mut blocked = bset.clone();
    blocked.union_with(&xs);
    let blocked_v: Vec<usize> = blocked.to_vec();
    let v0_free: Vec<usize> = part.v0.iter().copied().filter(|v| !blocked.contains(*v)).collect();
    let conn = match connect_pairs(&sprinkle.g1, &v0_free, &blocked_v, &pairs, &lengths, params, rng) {
        Ok(cn) => cn,
        Err(e) => {
            report.fail("connect", stage_err(&e));
            return done(report);
        }
    };
    report.ok(
        "connect",
        format!("{} paths; residual 10-expander verdict {}", conn.paths.len(), conn.residual_expander.holds),
    );

    // Assemble Q₁ R₁ Q₂ … Q_k from x₁ to y_k.
    let first_pos = qs[0].start_pos;
    let mut seq: Vec<usize> = Vec::new();
    for (i, q) in qs.iter().enumerate() {
        seq.extend(&q.vertices);
        if i + 1 < qs.len() {
            let r = &conn.paths[i];
            seq.extend(&r[1..r.len() - 1]);
        }
    }
    let (x1, yk) = (seq[0], *seq.last().unwrap());

    // Step D: Hamilton y_k,x₁-path through everything else.
    let mut on_q = BitSet::from_iter(n, seq.iter().copied());
    on_q.remove(x1);
    on_q.remove(yk);
    let rest: Vec<usize> = (0..n).filter(|v| !on_q.contains(*v)).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in rest.iter().enumerate() {
        index[v] = i;
    }
    let g1r = sprinkle.g1.induced(&rest);
    let mut consumed_local = Vec::new();
    let mut stream = sprinkle.stream2.iter().filter_map(|&(u, v)| {
        consumed_local.push((u, v));
        (index[u] != usize::MAX && index[v] != usize::MAX).then(|| (index[u], index[v]))
    });
    let found = posa_ham_path(&g1r, index[yk], index[x1], &mut stream, usize::MAX)?;
    drop(stream);
    let Some(out) = found else {
        report.consumed_stream2 = consumed_local;
        report.fail("posa", "sprinkled stream exhausted before a Hamilton path appeared");
        return done(report);
    };
    // Keep only the stream prefix actually read.
    let read = out.consumed.len();
    let mut kept = 0;
    let mut cut = 0;
    for (i, &(u, v)) in consumed_local.iter().enumerate() {
        if kept == read {
            break;
        }
        if index[u] != usize::MAX && index[v] != usize::MAX {
            kept += 1;
        }
        cut = i + 1;
    }
    consumed_local.truncate(cut);
    report.consumed_stream2 = consumed_local;
    report.ok("posa", format!("{} improvements, {} stream edges read", out.improvements, read));

    let mut map = vec![usize::MAX; n];
    for (t, &v) in seq.iter().enumerate() {
        map[(first_pos + t) % n] = v;
    }
    let tail = &out.path[1..out.path.len() - 1];
    for (t, &iv) in tail.iter().enumerate() {
        map[(first_pos + seq.len() + t) % n] = rest[iv];
    }
    let emb = Embedding::new(map, pins.to_vec());
    let host = host_digraph(d0, sprinkle, &report.consumed_stream2);
    if let Err(v) = emb.validate(&host, c) {
        report.fail("validate", format!("{v:?}"));
        return done(report);
    }
    report.ok("validate", "embedding replayed against D₀ and the consumed sprinkle");
    Ok(EmbedOutcome { embedding: Some(emb), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sample_dnp;
    use crate::rng::stream_rng;

    #[test]
    fn anti_directed_n200() {
        let n = 200;
        let params = PipelineParams::desk();
        let mut ok = 0;
        for seed in 0..5 {
            let mut rng = stream_rng(seed, 7);
            let d0 = sample_dnp(n, 20.0 * (n as f64).ln() / n as f64, &mut rng).unwrap();
            let c = OrientationPattern::anti_directed(n).unwrap();
            let sp = Sprinkle::sample(n, &params, None, &mut rng).unwrap();
            let w = Window { start: 0, len: params.window_len(n) };
            let out = embed_cycle(&d0, &[], &c, w, &[], &sp, &params, &mut rng).unwrap();
            if let Some(e) = &out.embedding {
                assert!(e.is_valid(&host_digraph(&d0, &sp, &out.report.consumed_stream2), &c));
                ok += 1;
            } else {
                eprintln!("{:?}", out.report.stages);
            }
        }
        assert!(ok >= 4, "{ok}");
    }

    #[test]
    fn bad_exceptional_set() {
        let d0 = Digraph::complete(30);
        let c = OrientationPattern::directed(30).unwrap();
        let params = PipelineParams::desk();
        let mut rng = stream_rng(0, 0);
        let sp = Sprinkle::sample(30, &params, None, &mut rng).unwrap();
        let w = Window { start: 0, len: 10 };
        assert!(embed_cycle(&d0, &[40], &c, w, &[], &sp, &params, &mut rng).unwrap_err().is_input());
    }
}
