//! Embedding an oriented cycle into a prefix of the random digraph process.
//!
//! Low in- or out-degree vertices are covered by short pattern pieces: each such
//! vertex `v` gets two neighbours `x_v, y_v`, the triple is contracted into one
//! exceptional vertex `z_v`, the pattern is shortened to match, and the contracted
//! instance goes through [`embed_cycle`]. The result is expanded back and replayed.

use crate::bitset::BitSet;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::{biorient, Digraph, Sign, UGraph};
use crate::landmarks::{select_landmarks, LandmarkSelection};
use crate::matching::{demand_matching, DemandMatching};
use crate::params::PipelineParams;
use crate::pattern::OrientationPattern;
use crate::pipeline::{embed_cycle, host_digraph, StageRecord, StageReport, Sprinkle, Window};
use crate::process::ProcessTrace;
use crate::rng::StreamRng;
use serde::Serialize;

/// A covered low-degree vertex with its pattern landmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub v: usize,
    /// Out-degree of the landmark position in the pattern.
    pub class: usize,
    /// Pattern position `a_v` that `v` occupies.
    pub landmark: usize,
    /// Vertex placed at `a_v − 1`.
    pub before: usize,
    /// Vertex placed at `a_v + 1`.
    pub after: usize,
}

/// Which contraction rule produced an edge at `z_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// `w z_v` from `w x_v`, pattern edge `d_v b_v`.
    InForward,
    /// `w z_v` from `x_v w`, pattern edge `b_v d_v`.
    InBackward,
    /// `z_v w` from `y_v w`, pattern edge `c_v e_v`.
    OutForward,
    /// `z_v w` from `w y_v`, pattern edge `e_v c_v`.
    OutBackward,
}

/// The contracted instance `(H′, C′)` and the maps needed to undo it.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub n: usize,
    pub n_bar: usize,
    pub triples: Vec<Triple>,
    /// Original vertex to contracted id, `usize::MAX` for contracted-away vertices.
    pub index: Vec<usize>,
    /// Contracted id to original vertex; `z` ids map to the covered vertex.
    pub back: Vec<usize>,
    pub h_bar: Digraph,
    pub c_bar: OrientationPattern,
    /// Position in `C` for each position of `C′` (`f_v` maps to `a_v`).
    pub pos_back: Vec<usize>,
    /// Position of `f_v` in `C′` for each triple.
    pub f_pos: Vec<usize>,
}

impl Contraction {
    /// Contracts every triple of `h` and shortens `c` around the landmarks.
    pub fn build(h: &Digraph, c: &OrientationPattern, triples: &[Triple]) -> Result<Self> {
        let n = h.n();
        if c.len() != n {
            return Err(Error::input("pattern length differs from n"));
        }
        let k = triples.len();
        if k > 0 && n < 5 {
            return Err(Error::input("contraction needs n ≥ 5"));
        }
        let mut removed = BitSet::new(n);
        let mut skip = BitSet::new(n);
        let mut landmark_of = vec![usize::MAX; n];
        for (t, tr) in triples.iter().enumerate() {
            for u in [tr.v, tr.before, tr.after] {
                if u >= n || !removed.insert(u) {
                    return Err(Error::input(format!("triple vertex {u} repeated or out of range")));
                }
            }
            if tr.landmark >= n || c.out_degree(tr.landmark) != tr.class {
                return Err(Error::input(format!("landmark {} has the wrong out-degree", tr.landmark)));
            }
            for off in [n - 2, n - 1, 0, 1, 2] {
                let p = (tr.landmark + off) % n;
                if landmark_of[p] != usize::MAX {
                    return Err(Error::input("landmark neighbourhoods overlap"));
                }
                landmark_of[p] = t;
            }
            skip.insert((tr.landmark + n - 1) % n);
            skip.insert((tr.landmark + 1) % n);
        }
        let n_bar = n - 2 * k;
        let mut index = vec![usize::MAX; n];
        let mut back = Vec::with_capacity(n_bar);
        for u in 0..n {
            if !removed.contains(u) {
                index[u] = back.len();
                back.push(u);
            }
        }
        for tr in triples {
            index[tr.v] = back.len();
            back.push(tr.v);
        }
        let z0 = n_bar - k;
        let mut h_bar = Digraph::new(n_bar);
        for (u, w) in h.edges() {
            if !removed.contains(u) && !removed.contains(w) {
                h_bar.add_edge(index[u], index[w]);
            }
        }
        for (t, tr) in triples.iter().enumerate() {
            let z = z0 + t;
            let d_fwd = c.forward((tr.landmark + n - 2) % n);
            let c_fwd = c.forward((tr.landmark + 1) % n);
            for w in (0..n).filter(|&w| !removed.contains(w)) {
                let into = if d_fwd { h.has_edge(w, tr.before) } else { h.has_edge(tr.before, w) };
                if into {
                    h_bar.add_edge(index[w], z);
                }
                let out = if c_fwd { h.has_edge(tr.after, w) } else { h.has_edge(w, tr.after) };
                if out {
                    h_bar.add_edge(z, index[w]);
                }
            }
        }

        // Shortened pattern: drop b_v and c_v, keep a_v as f_v with d_v → f_v → e_v.
        let mut bits = Vec::with_capacity(n_bar);
        let mut pos_back = Vec::with_capacity(n_bar);
        let mut new_pos = vec![usize::MAX; n];
        for p in (0..n).filter(|&p| !skip.contains(p)) {
            let t = landmark_of[p];
            let straight = t != usize::MAX && {
                let a = triples[t].landmark;
                p == a || p == (a + n - 2) % n
            };
            new_pos[p] = bits.len();
            bits.push(straight || c.forward(p));
            pos_back.push(p);
        }
        let c_bar = OrientationPattern::new(bits)?;
        let f_pos = triples.iter().map(|tr| new_pos[tr.landmark]).collect();
        Ok(Contraction { n, n_bar, triples: triples.to_vec(), index, back, h_bar, c_bar, pos_back, f_pos })
    }

    pub fn z(&self, t: usize) -> usize {
        self.n_bar - self.triples.len() + t
    }

    fn triple_of(&self, id: usize) -> Option<usize> {
        let z0 = self.n_bar - self.triples.len();
        (id >= z0 && id < self.n_bar).then(|| id - z0)
    }

    /// The original edge witnessing a contracted edge of `H′` and the rule used.
    /// `None` for edges between two contracted vertices.
    pub fn lift_edge(&self, c: &OrientationPattern, u: usize, w: usize) -> Option<((usize, usize), Rule)> {
        let n = self.n;
        match (self.triple_of(u), self.triple_of(w)) {
            (None, None) => None,
            (Some(_), Some(_)) => None,
            (None, Some(t)) => {
                let tr = &self.triples[t];
                let orig = self.back[u];
                if c.forward((tr.landmark + n - 2) % n) {
                    Some(((orig, tr.before), Rule::InForward))
                } else {
                    Some(((tr.before, orig), Rule::InBackward))
                }
            }
            (Some(t), None) => {
                let tr = &self.triples[t];
                let orig = self.back[w];
                if c.forward((tr.landmark + 1) % n) {
                    Some(((tr.after, orig), Rule::OutForward))
                } else {
                    Some(((orig, tr.after), Rule::OutBackward))
                }
            }
        }
    }

    /// Original undirected pairs standing in for a contracted undirected pair.
    pub fn expand_pair(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        let ord = |x: usize, y: usize| (x.min(y), x.max(y));
        match (self.triple_of(a), self.triple_of(b)) {
            (None, None) => vec![ord(self.back[a], self.back[b])],
            (Some(t), None) | (None, Some(t)) => {
                let w = self.back[if self.triple_of(a).is_some() { b } else { a }];
                let tr = &self.triples[t];
                vec![ord(w, tr.before), ord(w, tr.after)]
            }
            (Some(s), Some(t)) => {
                let (p, q) = (&self.triples[s], &self.triples[t]);
                vec![ord(p.after, q.before), ord(q.after, p.before)]
            }
        }
    }

    /// Expands an embedding of `C′` into `H′ ∪ ·` back to an embedding of `C`.
    pub fn expand_embedding(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.map.len() != self.n_bar {
            return Err(Error::input("embedding does not match the contracted pattern"));
        }
        let n = self.n;
        let mut map = vec![usize::MAX; n];
        for (q, &id) in inner.map.iter().enumerate() {
            map[self.pos_back[q]] = self.back[id];
        }
        for (t, tr) in self.triples.iter().enumerate() {
            if inner.map[self.f_pos[t]] != self.z(t) {
                return Err(Error::input(format!("z for vertex {} is not at its landmark", tr.v)));
            }
            map[(tr.landmark + n - 1) % n] = tr.before;
            map[(tr.landmark + 1) % n] = tr.after;
        }
        Ok(Embedding::new(map, Vec::new()))
    }
}

/// Degree-class bookkeeping for one prefix.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Classification {
    pub case: String,
    pub low: Vec<usize>,
    /// `classes[j]` holds the low vertices to be placed at out-degree-`j` positions.
    pub classes: [Vec<usize>; 3],
    /// Vertices moved to classes 0 or 2 in the few-direction-change case.
    pub moved: Vec<usize>,
    pub forest_condition: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessReport {
    pub n: usize,
    pub i: usize,
    pub s_i: usize,
    pub t_i: usize,
    pub shortcut: bool,
    pub classification: Classification,
    pub triples: Vec<Triple>,
    pub landmarks: Option<LandmarkSelection>,
    pub n_bar: usize,
    pub stages: Vec<StageRecord>,
    pub failed_stage: Option<String>,
    pub inner: Option<StageReport>,
    /// Sprinkled pairs in original labels, bi-oriented into the host.
    pub sprinkle_pairs: Vec<(usize, usize)>,
}

impl ProcessReport {
    fn ok(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageRecord { stage: stage.into(), ok: true, detail: detail.into() });
    }

    fn fail(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageRecord { stage: stage.into(), ok: false, detail: detail.into() });
        self.failed_stage = Some(stage.into());
    }

    /// `D_i ∪` the bi-oriented sprinkled pairs.
    pub fn host(&self, prefix: &Digraph) -> Digraph {
        let mut g = UGraph::new(prefix.n());
        for &(u, v) in &self.sprinkle_pairs {
            g.add_edge(u, v);
        }
        prefix.union(&biorient(&g))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessOutcome {
    pub embedding: Option<Embedding>,
    pub report: ProcessReport,
}

/// `(s_i, t_i)`: vertices with a zero in- or out-degree, and vertices with both degrees 1.
pub fn zero_and_unit_counts(d: &Digraph) -> (usize, usize) {
    let mut s = 0;
    let mut t = 0;
    for v in 0..d.n() {
        let (o, i) = (d.deg(v, Sign::Out, None), d.deg(v, Sign::In, None));
        s += (o == 0 || i == 0) as usize;
        t += (o == 1 && i == 1) as usize;
    }
    (s, t)
}

/// The conditioned digraph: `D_{i₀}` plus every edge of `D_i` touching a vertex of low
/// degree in `D_{i₀}`. Returns the digraph and the low set `S`.
fn conditioned(trace: &mut ProcessTrace, i: usize, params: &PipelineParams) -> Result<(Digraph, Digraph, BitSet)> {
    let n = trace.n();
    let d_i = trace.prefix(i)?;
    let i0 = params.split_index(n);
    if params.use_full_prefix || i <= i0 {
        return Ok((d_i.clone(), d_i, BitSet::new(n)));
    }
    let d0 = trace.prefix(i0)?;
    let low = params.low_degree(n);
    let s = BitSet::from_iter(
        n,
        (0..n).filter(|&v| Sign::BOTH.iter().any(|&sg| d0.deg(v, sg, None) as f64 <= low)),
    );
    let mut h = d0;
    for (u, w) in d_i.edges() {
        if s.contains(u) || s.contains(w) {
            h.add_edge(u, w);
        }
    }
    Ok((d_i, h, s))
}

fn union_graph(h: &Digraph) -> UGraph {
    h.underlying()
}

/// Forest defect of `U = Y ∖ B`: zero exactly when `H[U ∪ N(U)]` is a forest with `|U|`
/// components avoiding `B`.
fn forest_defect(g: &UGraph, low: &[usize], b: &BitSet) -> usize {
    let n = g.n();
    let u: Vec<usize> = low.iter().copied().filter(|v| !b.contains(*v)).collect();
    let mut w = BitSet::from_iter(n, u.iter().copied());
    for &v in &u {
        w.union_with(g.adj(v));
    }
    let verts = w.to_vec();
    let sub = g.induced(&verts);
    let comps = sub.components().len();
    let cyclomatic = sub.m() + comps - verts.len();
    cyclomatic + comps.abs_diff(u.len()) + w.intersection_count(b)
}

/// Splits the low vertices into classes and picks their two neighbours.
fn classify(h: &Digraph, c: &OrientationPattern, low_deg: f64, case_hint: Option<bool>) -> Result<(Classification, Vec<(usize, usize, usize)>)> {
    let n = h.n();
    let dout = |v: usize| h.deg(v, Sign::Out, None);
    let din = |v: usize| h.deg(v, Sign::In, None);
    let low: Vec<usize> = (0..n).filter(|&v| dout(v) as f64 <= low_deg || din(v) as f64 <= low_deg).collect();
    let in_t = |v: usize| dout(v) as f64 <= low_deg && din(v) as f64 <= low_deg;
    let sinks = c.out_degree_profile().0;
    let case_one = case_hint.unwrap_or(4 * sinks >= n);
    let mut cls = Classification { low: low.clone(), forest_condition: true, ..Default::default() };
    let mut class_of = vec![usize::MAX; n];
    if case_one {
        cls.case = "many-changes".into();
        for &v in &low {
            let (o, i) = (dout(v), din(v));
            let j = if !in_t(v) {
                if i as f64 > low_deg { 0 } else { 2 }
            } else if i >= 2 {
                0
            } else if o >= 2 {
                2
            } else {
                1
            };
            class_of[v] = j;
        }
    } else {
        cls.case = "few-changes".into();
        let g = union_graph(h);
        let mut b = BitSet::new(n);
        let candidates: Vec<usize> = low.iter().copied().filter(|&v| !in_t(v)).collect();
        let mut defect = forest_defect(&g, &low, &b);
        while defect > 0 {
            let best = candidates
                .iter()
                .copied()
                .filter(|v| !b.contains(*v))
                .map(|v| {
                    let mut trial = b.clone();
                    trial.insert(v);
                    (forest_defect(&g, &low, &trial), v)
                })
                .min();
            let Some((next, v)) = best else { break };
            b.insert(v);
            defect = next;
        }
        if defect > 0 {
            cls.forest_condition = false;
        } else {
            for v in b.to_vec() {
                b.remove(v);
                if forest_defect(&g, &low, &b) > 0 {
                    b.insert(v);
                }
            }
        }
        cls.moved = b.to_vec();
        for &v in &low {
            let j = if b.contains(v) {
                if din(v) as f64 > low_deg { 0 } else { 2 }
            } else if dout(v) == 0 {
                0
            } else if din(v) == 0 {
                2
            } else {
                1
            };
            class_of[v] = j;
        }
    }
    for &v in &low {
        cls.classes[class_of[v]].push(v);
    }

    // Two slots per low vertex; neighbours outside N(Y − v) are preferred.
    let is_low = BitSet::from_iter(n, low.iter().copied());
    let mut touch = vec![0usize; n];
    for &v in &low {
        let mut nb = h.adj(v, Sign::Out).clone();
        nb.union_with(h.adj(v, Sign::In));
        for u in nb.iter() {
            touch[u] += 1;
        }
    }
    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(2 * low.len());
    for &v in &low {
        let signs = match class_of[v] {
            0 => [Sign::In, Sign::In],
            2 => [Sign::Out, Sign::Out],
            _ => [Sign::Out, Sign::In],
        };
        let mut own = h.adj(v, Sign::Out).clone();
        own.union_with(h.adj(v, Sign::In));
        for sg in signs {
            let mut cand: Vec<usize> = h.adj(v, sg).iter().filter(|u| !is_low.contains(*u)).collect();
            cand.sort_by_key(|&u| (touch[u] - own.contains(u) as usize, u));
            slots.push(cand);
        }
    }
    let picks = match demand_matching(&slots, n, 1) {
        DemandMatching::Complete(assign) => low
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, assign[2 * k][0], assign[2 * k + 1][0]))
            .collect(),
        DemandMatching::Deficient(u) => {
            let verts: Vec<usize> = u.iter().map(|s| low[s / 2]).collect();
            return Err(Error::Stage { stage: "classify".into(), detail: format!("no distinct neighbours for {verts:?}") });
        }
    };
    Ok((cls, picks))
}

/// Tries to embed `c` into `prefix(trace, i)` plus a sprinkled random digraph.
pub fn process_embed(
    trace: &mut ProcessTrace,
    i: usize,
    c: &OrientationPattern,
    params: &PipelineParams,
    rng: &mut StreamRng,
) -> Result<ProcessOutcome> {
    params.validate()?;
    let n = trace.n();
    if c.len() != n {
        return Err(Error::input(format!("pattern has length {}, process has {n} vertices", c.len())));
    }
    if i > trace.total() {
        return Err(Error::input(format!("index {i} beyond the process length {}", trace.total())));
    }
    let (d_i, h, s_set) = conditioned(trace, i, params)?;
    if let Some(v) = (0..n).find(|&v| d_i.deg(v, Sign::Out, None) + d_i.deg(v, Sign::In, None) < 2) {
        return Err(Error::input(format!("vertex {v} has total degree below 2 at index {i}")));
    }
    let (s_i, t_i) = zero_and_unit_counts(&d_i);
    let changes = 2 * c.out_degree_profile().0;
    let ln = (n as f64).ln();
    let lower = 1.0 + (s_i as f64 - 1.0) * ln;
    let upper = n as f64 - 1.0 - (t_i as f64 - 1.0) * ln;
    if (changes as f64) < lower || changes as f64 > upper {
        return Err(Error::PatternOutOfRange(format!(
            "{changes} direction changes outside [1+(s−1)ln n, n−1−(t−1)ln n] = [{lower:.2}, {upper:.2}] with s={s_i}, t={t_i}"
        )));
    }
    let mut report = ProcessReport {
        n,
        i,
        s_i,
        t_i,
        shortcut: false,
        classification: Classification::default(),
        triples: Vec::new(),
        landmarks: None,
        n_bar: n,
        stages: Vec::new(),
        failed_stage: None,
        inner: None,
        sprinkle_pairs: Vec::new(),
    };
    let done = |report: ProcessReport| Ok(ProcessOutcome { embedding: None, report });

    if d_i.is_complete() {
        report.shortcut = true;
        report.ok("shortcut", "complete prefix: identity placement");
        return Ok(ProcessOutcome { embedding: Some(Embedding::new((0..n).collect(), Vec::new())), report });
    }

    let (cls, picks) = match classify(&h, c, params.low_degree(n), None) {
        Ok(x) => x,
        Err(e) => {
            report.fail("classify", e.to_string());
            return done(report);
        }
    };
    let counts: Vec<usize> = cls.classes.iter().map(Vec::len).collect();
    report.ok("classify", format!("{} case, classes {counts:?}, forest condition {}", cls.case, cls.forest_condition));
    report.classification = cls.clone();

    // Landmarks: far enough apart that each cover slot plus a connection fits after contraction.
    let k = cls.low.len();
    let n_est = n - 2 * k;
    let h_len = params.cover_half_len(n_est);
    let spacing = params.spacing(n_est).max(2 * h_len + 1 + params.min_connect_len(n_est)) + 2;
    let mu = [counts[0], counts[1], counts[2]];
    let spacing = spacing.max(5);
    let max_len = params.window_len(n);
    // Shortest window that fits, so the connections between cover paths stay short.
    let mut len = (k.saturating_sub(1) * spacing + 1).min(max_len);
    let sel = loop {
        match select_landmarks(c, mu, spacing, len) {
            Ok(s) => break s,
            Err(e) if len >= max_len => {
                report.fail("landmarks", e.to_string());
                return done(report);
            }
            Err(_) => len = (len + len / 4 + spacing).min(max_len),
        }
    };
    report.ok("landmarks", format!("window at {} of length {}", sel.start, sel.len));
    let pick_of: std::collections::HashMap<usize, (usize, usize)> = picks.iter().map(|&(v, a, b)| (v, (a, b))).collect();
    let mut triples = Vec::with_capacity(k);
    for j in 0..3 {
        for (&v, &a) in cls.classes[j].iter().zip(&sel.z[j]) {
            let (x, y) = pick_of[&v];
            // x is the out-neighbour for class 1, y the in-neighbour.
            let (before, after) = if j == 1 && !c.forward((a + n - 1) % n) { (x, y) } else if j == 1 { (y, x) } else { (x, y) };
            triples.push(Triple { v, class: j, landmark: a, before, after });
        }
    }
    triples.sort_by_key(|t| sel.offset(n, t.landmark));
    report.landmarks = Some(sel.clone());
    report.triples = triples.clone();

    let con = match Contraction::build(&h, c, &triples) {
        Ok(x) => x,
        Err(e) => {
            report.fail("contract", e.to_string());
            return done(report);
        }
    };
    let nb = con.n_bar;
    report.n_bar = nb;
    report.ok("contract", format!("{k} triples, {nb} vertices remain"));

    // Window of C′ starting just before the first f_v.
    let (start, len) = if k == 0 {
        (0, params.window_len(nb))
    } else {
        let lead = h_len + 1;
        let start = (con.f_pos[0] + nb - lead) % nb;
        let span = (con.f_pos[k - 1] + nb - start) % nb;
        (start, params.window_len(nb).max(span + lead).min(nb - 1))
    };
    let window = Window { start, len };
    let pins: Vec<(usize, usize)> = (0..k).map(|t| (con.f_pos[t], con.z(t))).collect();
    let x: Vec<usize> = (0..k).map(|t| con.z(t)).collect();

    // Sprinkle on the contracted vertex set, away from the conditioned low vertices.
    let support = BitSet::from_iter(nb, (0..nb - k).filter(|&id| !s_set.contains(con.back[id])));
    let sprinkle = Sprinkle::sample(nb, params, Some(&support), rng)?;
    let inner = match embed_cycle(&con.h_bar, &x, &con.c_bar, window, &pins, &sprinkle, params, rng) {
        Ok(o) => o,
        Err(e) => {
            report.fail("embed", e.to_string());
            return done(report);
        }
    };
    let mut pairs: Vec<(usize, usize)> = sprinkle.g1.edges();
    pairs.extend(&inner.report.consumed_stream2);
    let mut orig_pairs: Vec<(usize, usize)> = pairs.iter().flat_map(|&(a, b)| con.expand_pair(a, b)).collect();
    orig_pairs.sort_unstable();
    orig_pairs.dedup();
    report.sprinkle_pairs = orig_pairs;
    let inner_emb = inner.embedding.clone();
    let inner_failed = inner.report.failed_stage.clone();
    report.inner = Some(inner.report);
    let Some(e_bar) = inner_emb else {
        report.fail("embed", format!("contracted pipeline failed at {}", inner_failed.unwrap_or_default()));
        return done(report);
    };
    debug_assert!(e_bar.is_valid(
        &host_digraph(&con.h_bar, &sprinkle, &report.inner.as_ref().unwrap().consumed_stream2),
        &con.c_bar
    ));
    report.ok("embed", "contracted instance embedded");
    let emb = match con.expand_embedding(&e_bar) {
        Ok(e) => e,
        Err(e) => {
            report.fail("expand", e.to_string());
            return done(report);
        }
    };
    let mut host = UGraph::new(n);
    for &(u, v) in &report.sprinkle_pairs {
        host.add_edge(u, v);
    }
    let host = h.union(&biorient(&host));
    if let Err(v) = emb.validate(&host, c) {
        report.fail("validate", format!("{v:?}"));
        return done(report);
    }
    report.ok("validate", "expanded embedding replayed against the prefix and the sprinkle");
    Ok(ProcessOutcome { embedding: Some(emb), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::sample_process;
    use crate::rng::stream_rng;

    fn p(s: &str) -> OrientationPattern {
        OrientationPattern::parse(s).unwrap()
    }

    #[test]
    fn shortened_pattern_keeps_orientation_elsewhere() {
        // Landmark at position 4 of a 10-cycle.
        let c = p("++-+-+--++");
        let h = Digraph::complete(10);
        let tr = Triple { v: 0, class: c.out_degree(4), landmark: 4, before: 1, after: 2 };
        let con = Contraction::build(&h, &c, &[tr]).unwrap();
        assert_eq!(con.n_bar, 8);
        assert_eq!(con.c_bar.len(), 8);
        assert_eq!(con.pos_back, vec![0, 1, 2, 4, 6, 7, 8, 9]);
        // d = 2 and f = 4 point forward; the rest copy the old bits.
        let bits: Vec<bool> = con.c_bar.bits().to_vec();
        assert_eq!(bits, vec![true, true, true, true, false, false, true, true]);
    }

    #[test]
    fn lifted_edges_exist() {
        let n = 14;
        let mut rng = stream_rng(3, 0);
        let h = crate::models::sample_dnp(n, 0.5, &mut rng).unwrap();
        let c = p("+-++--+-+++--+");
        let tr = Triple { v: 3, class: c.out_degree(6), landmark: 6, before: 5, after: 9 };
        let con = Contraction::build(&h, &c, &[tr]).unwrap();
        for (u, w) in con.h_bar.edges() {
            match con.lift_edge(&c, u, w) {
                Some(((a, b), _)) => assert!(h.has_edge(a, b)),
                None => assert!(h.has_edge(con.back[u], con.back[w])),
            }
        }
    }

    #[test]
    fn complete_prefix_shortcut() {
        let n = 8;
        let mut trace = sample_process(n, stream_rng(1, 1));
        let c = p("+-+--+-+");
        let out = process_embed(&mut trace, n * (n - 1), &c, &PipelineParams::desk(), &mut stream_rng(0, 0)).unwrap();
        assert!(out.report.shortcut);
        assert!(out.embedding.unwrap().is_valid(&Digraph::complete(n), &c));
    }

    #[test]
    fn too_few_changes() {
        let n = 40;
        let mut trace = sample_process(n, stream_rng(2, 2));
        // Early enough that several vertices still have a zero degree, late enough for total degree 2.
        let mut i = 0;
        while {
            let d = trace.prefix(i).unwrap();
            (0..n).any(|v| d.deg(v, Sign::Out, None) + d.deg(v, Sign::In, None) < 2)
        } {
            i += 1;
        }
        let d = trace.prefix(i).unwrap();
        let (s, _) = zero_and_unit_counts(&d);
        if s >= 2 {
            let c = OrientationPattern::directed(n).unwrap();
            let err = process_embed(&mut trace, i, &c, &PipelineParams::desk(), &mut stream_rng(0, 0)).unwrap_err();
            assert!(matches!(err, Error::PatternOutOfRange(_)));
        }
        let early = process_embed(&mut trace, 0, &OrientationPattern::directed(n).unwrap(), &PipelineParams::desk(), &mut stream_rng(0, 0));
        assert!(early.unwrap_err().is_input());
    }
}
