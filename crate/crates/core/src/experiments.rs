//! Hitting times, process-property diagnostics, threshold scans and the row format
//! they are emitted in.

use crate::bitset::BitSet;
use crate::coupling::{coupling_chain, CouplingRandomness};
use crate::error::{Error, Result};
use crate::graph::{Digraph, Sign, UGraph};
use crate::models::sample_dnp;
use crate::oracle::{contains_all_patterns, find_embedding, ALL_PATTERNS_CAP, EMBED_CAP};
use crate::params::PipelineParams;
use crate::pattern::{canonical_classes, OrientationPattern};
use crate::pipeline::{embed_cycle, Sprinkle, Window};
use crate::process::{sample_process, ProcessTrace};
use crate::rng::{stream_rng, trial_rng};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "experiment,n,seed,trial,i,p,pattern,metric,value";

/// One emitted measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub n: usize,
    pub seed: u64,
    pub trial: Option<usize>,
    pub i: Option<usize>,
    pub p: Option<f64>,
    pub pattern: String,
    pub metric: String,
    pub value: f64,
}

impl Row {
    fn new(experiment: &str, n: usize, seed: u64, metric: &str, value: f64) -> Self {
        Row {
            experiment: experiment.into(),
            n,
            seed,
            trial: None,
            i: None,
            p: None,
            pattern: String::new(),
            metric: metric.into(),
            value,
        }
    }

    fn trial(mut self, t: usize) -> Self {
        self.trial = Some(t);
        self
    }

    fn at(mut self, i: usize) -> Self {
        self.i = Some(i);
        self
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))
            .map_err(|e| Error::input(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::input(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::input(e.to_string()))
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::input(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::input(format!("unexpected csv header {}", header.join(","))));
    }
    r.deserialize()
        .map(|x| x.map_err(|e| Error::input(e.to_string())))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    schema_version: u32,
    rows: Vec<Row>,
}

pub fn rows_to_json(rows: &[Row]) -> String {
    let doc = JsonDoc { schema_version: SCHEMA_VERSION, rows: rows.to_vec() };
    serde_json::to_string_pretty(&doc).expect("rows serialize") + "\n"
}

pub fn rows_from_json(text: &str) -> Result<Vec<Row>> {
    let doc: JsonDoc = serde_json::from_str(text).map_err(|e| Error::input(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::input(format!("schema version {} not supported", doc.schema_version)));
    }
    Ok(doc.rows)
}

/// Runs `f(trial)` for every trial, on `jobs` threads (0 = all cores), results in trial order.
pub fn par_trials<T, F>(trials: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if jobs == 1 {
        return (0..trials).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| (0..trials).into_par_iter().map(f).collect())
}

// ---------------------------------------------------------------------------
// Statistics

/// Wilson score interval for `k` successes in `n` trials at two-sided confidence `conf`.
pub fn wilson(k: usize, n: usize, conf: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - (1.0 - conf) / 2.0);
    let nf = n as f64;
    let ph = k as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (ph + z * z / (2.0 * nf)) / denom;
    let half = z * (ph * (1.0 - ph) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Goodness of fit of `observed` counts against cell probabilities. Cells with zero
/// probability are structural: any count there gives `p_value = 0`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::input("observed and expected cells differ in number"));
    }
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &q) in observed.iter().zip(probs) {
        if q <= 0.0 {
            if o > 0 {
                return Ok(ChiSquare { statistic: f64::INFINITY, df: 0, p_value: 0.0 });
            }
            continue;
        }
        let e = q * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat)
    };
    Ok(ChiSquare { statistic: stat, df, p_value })
}

/// One-sided p-value for `p₁ > p₂` from the pooled two-proportion z-test.
pub fn two_proportion_greater(k1: usize, n1: usize, k2: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let pool = (k1 + k2) as f64 / (a + b);
    let se = (pool * (1.0 - pool) * (1.0 / a + 1.0 / b)).sqrt();
    let diff = k1 as f64 / a - k2 as f64 / b;
    if se == 0.0 {
        return if diff > 0.0 { 0.0 } else { 1.0 };
    }
    1.0 - Normal::new(0.0, 1.0).unwrap().cdf(diff / se)
}

// ---------------------------------------------------------------------------
// Hitting times

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessStats {
    pub n: usize,
    /// First index where every vertex has total degree at least 2.
    pub m0: Option<usize>,
    /// Last index where some vertex has in- or out-degree 0.
    pub m1: Option<usize>,
    /// `s[i]`: vertices of `D_i` with in- or out-degree 0.
    pub s: Vec<usize>,
    /// `t[i]`: vertices of `D_i` with in- and out-degree exactly 1.
    pub t: Vec<usize>,
}

pub fn hitting_times(trace: &mut ProcessTrace) -> Result<ProcessStats> {
    let n = trace.n();
    let total = trace.total();
    trace.ensure(total)?;
    let mut out = vec![0usize; n];
    let mut inn = vec![0usize; n];
    let mut s_now = n;
    let mut t_now = 0usize;
    let mut below2 = n;
    let mut s = Vec::with_capacity(total + 1);
    let mut t = Vec::with_capacity(total + 1);
    s.push(s_now);
    t.push(t_now);
    let mut m0 = (n > 0 && below2 == 0).then_some(0);
    let zero = |o: usize, i: usize| (o == 0 || i == 0) as usize;
    let unit = |o: usize, i: usize| (o == 1 && i == 1) as usize;
    for (k, &(u, v)) in trace.materialized().iter().enumerate() {
        let (u, v) = (u as usize, v as usize);
        for (w, is_out) in [(u, true), (v, false)] {
            let (o, i) = (out[w], inn[w]);
            s_now -= zero(o, i);
            t_now -= unit(o, i);
            below2 -= (o + i < 2) as usize;
            if is_out {
                out[w] += 1;
            } else {
                inn[w] += 1;
            }
            let (o, i) = (out[w], inn[w]);
            s_now += zero(o, i);
            t_now += unit(o, i);
            below2 += (o + i < 2) as usize;
        }
        s.push(s_now);
        t.push(t_now);
        if m0.is_none() && below2 == 0 {
            m0 = Some(k + 1);
        }
    }
    let m1 = s.iter().rposition(|&x| x > 0);
    Ok(ProcessStats { n, m0, m1, s, t })
}

// ---------------------------------------------------------------------------
// Process properties

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    /// Measured quantity; path counts saturate one above the bound.
    pub measured: f64,
    pub bound: f64,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub n: usize,
    pub d: f64,
    /// Raw checkpoint values `i₀, i₁, i₂, i₃` before flooring.
    pub checkpoints: [f64; 4],
    pub results: Vec<PropertyResult>,
}

pub const PROPERTY_NAMES: [&str; 12] = [
    "few-low-at-i0",
    "few-late-edges-at-low",
    "few-short-low-paths",
    "no-short-low-cycles",
    "stars-at-i2",
    "stars-at-T",
    "two-low-neighbours",
    "expansion",
    "max-degree",
    "isolated-at-i1",
    "many-sources-at-i2",
    "min-degree-at-i3",
];

/// Checkpoints each property reads, in increasing order.
fn needed(id: usize) -> &'static [usize] {
    match id {
        1 => &[0],
        2 => &[0, 3],
        3 | 4 | 7 => &[1, 3],
        5 => &[2, 3],
        6 => &[1, 3],
        8 | 9 | 12 => &[3],
        10 => &[1],
        11 => &[2],
        _ => &[],
    }
}

pub fn checkpoint_values(n: usize) -> [f64; 4] {
    let nf = n as f64;
    let ln = nf.ln();
    let lnln = ln.ln();
    [
        9.0 * nf * ln / 20.0,
        nf * ln / 2.0 - nf * lnln,
        3.0 * nf * ln / 4.0,
        nf * ln + 2.0 * nf * lnln,
    ]
}

fn low_set(k: &Digraph, d: f64) -> BitSet {
    BitSet::from_iter(
        k.n(),
        (0..k.n()).filter(|&v| Sign::BOTH.iter().any(|&s| k.deg(v, s, None) as f64 <= d)),
    )
}

fn any_neighbours(k: &Digraph, v: usize) -> BitSet {
    let mut s = k.adj(v, Sign::Out).clone();
    s.union_with(k.adj(v, Sign::In));
    s
}

/// Simple paths of length 1–4 in the underlying graph between distinct low vertices,
/// each counted once; stops one above `cap`.
fn count_low_paths(g: &UGraph, low: &BitSet, cap: usize) -> (usize, Vec<usize>) {
    let mut count = 0;
    let mut first = Vec::new();
    let mut path = Vec::with_capacity(5);
    fn rec(g: &UGraph, low: &BitSet, path: &mut Vec<usize>, count: &mut usize, first: &mut Vec<usize>, cap: usize) {
        let last = *path.last().unwrap();
        for w in g.adj(last).iter() {
            if *count > cap {
                return;
            }
            if path.contains(&w) {
                continue;
            }
            path.push(w);
            if low.contains(w) && w > path[0] {
                *count += 1;
                if first.is_empty() {
                    *first = path.clone();
                }
            }
            if path.len() < 5 {
                rec(g, low, path, count, first, cap);
            }
            path.pop();
        }
    }
    for s in low.iter() {
        path.clear();
        path.push(s);
        rec(g, low, &mut path, &mut count, &mut first, cap);
        if count > cap {
            break;
        }
    }
    (count.min(cap + 1), first)
}

/// A cycle of length 2 or 3 through a low vertex, if any.
fn short_low_cycle(k: &Digraph, low: &BitSet) -> Option<Vec<usize>> {
    let g = k.underlying();
    for v in low.iter() {
        for u in k.adj(v, Sign::Out).iter() {
            if k.has_edge(u, v) {
                return Some(vec![v, u]);
            }
        }
        let nb: Vec<usize> = g.adj(v).iter().collect();
        for (a, &x) in nb.iter().enumerate() {
            for &y in &nb[a + 1..] {
                if g.has_edge(x, y) {
                    return Some(vec![v, x, y]);
                }
            }
        }
    }
    None
}

/// Whether `K[C ∪ N(C)]` is a disjoint union of `|C|` stars centred in `C`, avoiding `forbidden`.
fn stars(k: &Digraph, centres: &BitSet, forbidden: Option<&BitSet>) -> (bool, Vec<usize>) {
    let mut w = centres.clone();
    for c in centres.iter() {
        w.union_with(&any_neighbours(k, c));
    }
    if let Some(f) = forbidden {
        if let Some(v) = w.iter().find(|&v| f.contains(v)) {
            return (false, vec![v]);
        }
    }
    for u in w.iter() {
        for v in k.adj(u, Sign::Out).iter() {
            if !w.contains(v) {
                continue;
            }
            if k.has_edge(v, u) {
                return (false, vec![u, v]);
            }
            // every edge of a star touches exactly one centre
            if centres.contains(u) == centres.contains(v) {
                return (false, vec![u, v]);
            }
        }
    }
    // A leaf joined to two centres would merge two stars.
    let g = k.underlying();
    for u in w.iter().filter(|&u| !centres.contains(u)) {
        if g.adj(u).intersection_count(centres) > 1 {
            return (false, vec![u]);
        }
    }
    (true, Vec::new())
}

/// Evaluates the selected properties (ids 1–12) on the checkpoint prefixes of `trace`.
pub fn check_process_properties(trace: &mut ProcessTrace, which: &[usize]) -> Result<PropertyReport> {
    let n = trace.n();
    let raw = checkpoint_values(n);
    let total = trace.total();
    let ln = (n as f64).ln();
    let d = ln / 300.0;
    if let Some(&bad) = which.iter().find(|&&id| !(1..=12).contains(&id)) {
        return Err(Error::input(format!("unknown property {bad}")));
    }
    let mut problems = Vec::new();
    for &id in which {
        let need = needed(id);
        for &j in need {
            if !(raw[j] >= 0.0 && raw[j] <= total as f64) {
                problems.push(format!("i{j}={:.1} outside [0, {total}] (property {id})", raw[j]));
            }
        }
        for w in need.windows(2) {
            if raw[w[0]] > raw[w[1]] {
                problems.push(format!("i{}={:.1} > i{}={:.1} (property {id})", w[0], raw[w[0]], w[1], raw[w[1]]));
            }
        }
    }
    if !problems.is_empty() {
        problems.sort();
        problems.dedup();
        return Err(Error::input(format!("checkpoints cannot be ordered: {}", problems.join("; "))));
    }
    let idx: Vec<usize> = raw.iter().map(|&x| x.max(0.0).floor() as usize).collect();
    let mut k: Vec<Option<Digraph>> = vec![None, None, None, None];
    for &id in which {
        for &j in needed(id) {
            if k[j].is_none() {
                k[j] = Some(trace.prefix(idx[j])?);
            }
        }
    }
    let kk = |j: usize| k[j].as_ref().expect("loaded above");
    let mut results = Vec::new();
    for &id in which {
        let name = PROPERTY_NAMES[id - 1].to_string();
        let (passed, measured, bound, witness) = match id {
            1 => {
                let s0 = low_set(kk(0), d);
                let b = (n as f64).powf(2.0 / 3.0);
                (s0.count() as f64 <= b, s0.count() as f64, b, Vec::new())
            }
            2 => {
                let s0 = low_set(kk(0), d);
                let mut cnt = 0;
                for e in idx[0]..idx[3] {
                    let (u, v) = trace.edge(e)?;
                    cnt += (s0.contains(u) || s0.contains(v)) as usize;
                }
                (cnt <= n, cnt as f64, n as f64, Vec::new())
            }
            3 => {
                let s1 = low_set(kk(1), d);
                let b = (n as f64).powf(1.0 / 6.0);
                let (c, w) = count_low_paths(&kk(3).underlying(), &s1, b.floor() as usize);
                (c as f64 <= b, c as f64, b, if c as f64 > b { w } else { Vec::new() })
            }
            4 => {
                let s1 = low_set(kk(1), d);
                match short_low_cycle(kk(3), &s1) {
                    Some(w) => (false, w.len() as f64, 0.0, w),
                    None => (true, 0.0, 0.0, Vec::new()),
                }
            }
            5 => {
                let s2 = low_set(kk(2), d);
                let (ok, w) = stars(kk(3), &s2, None);
                (ok, s2.count() as f64, s2.count() as f64, w)
            }
            6 => {
                let k1 = kk(1);
                let t = BitSet::from_iter(
                    n,
                    (0..n).filter(|&v| Sign::BOTH.iter().all(|&s| k1.deg(v, s, None) as f64 <= d)),
                );
                let mut other = low_set(k1, d);
                other.difference_with(&t);
                let (ok, w) = stars(kk(3), &t, Some(&other));
                (ok, t.count() as f64, t.count() as f64, w)
            }
            7 => {
                let s1 = low_set(kk(1), d);
                let k3 = kk(3);
                let mut cnt = vec![0usize; n];
                for u in s1.iter() {
                    for w in any_neighbours(k3, u).iter() {
                        cnt[w] += 1;
                    }
                }
                let mut worst = (0usize, usize::MAX);
                for v in 0..n {
                    let own = any_neighbours(k3, v);
                    let inside = |w: usize| {
                        s1.contains(w) || cnt[w] > (s1.contains(v) && own.contains(w)) as usize
                    };
                    for s in Sign::BOTH {
                        let c = k3.adj(v, s).iter().filter(|&w| inside(w)).count();
                        if c > worst.0 {
                            worst = (c, v);
                        }
                    }
                }
                let w = if worst.0 > 2 { vec![worst.1] } else { Vec::new() };
                (worst.0 <= 2, worst.0 as f64, 2.0, w)
            }
            8 => {
                let k3 = kk(3);
                let t = ln.powf(2.0 / 3.0) / 2.0;
                let need = 100.0 * ln.powf(1.0 / 3.0);
                let mut found = None;
                'outer: for v in 0..n {
                    for s in Sign::BOTH {
                        let dv = k3.deg(v, s, None) as f64;
                        if dv >= t && dv < need {
                            found = Some((v, dv));
                            break 'outer;
                        }
                    }
                }
                match found {
                    Some((v, dv)) => (false, dv, need, vec![v]),
                    None => (true, 0.0, need, Vec::new()),
                }
            }
            9 => {
                let k3 = kk(3);
                let m = k3.max_degree(Sign::Out).max(k3.max_degree(Sign::In)) as f64;
                (m <= 50.0 * ln, m, 50.0 * ln, Vec::new())
            }
            10 => {
                let k1 = kk(1);
                let iso: Vec<usize> =
                    (0..n).filter(|&v| k1.deg(v, Sign::Out, None) + k1.deg(v, Sign::In, None) == 0).collect();
                (!iso.is_empty(), iso.len() as f64, 1.0, iso.into_iter().take(1).collect())
            }
            11 => {
                let k2 = kk(2);
                let c = (0..n).filter(|&v| k2.deg(v, Sign::In, None) == 0).count() as f64;
                let b = (n as f64).powf(0.2);
                (c >= b, c, b, Vec::new())
            }
            12 => {
                let k3 = kk(3);
                let m = k3.min_degree(Sign::Out).min(k3.min_degree(Sign::In)) as f64;
                (m >= 2.0, m, 2.0, Vec::new())
            }
            _ => unreachable!(),
        };
        results.push(PropertyResult { id, name, passed, measured, bound, witness });
    }
    Ok(PropertyReport { n, d, checkpoints: raw, results })
}

/// Property checks over `trials` seeded processes, one row per (trial, property).
pub fn property_experiment(n: usize, trials: usize, seed: u64, which: &[usize], jobs: usize) -> Result<Vec<Row>> {
    let per: Vec<Result<PropertyReport>> = par_trials(trials, jobs, |t| {
        let mut trace = sample_process(n, trial_rng(seed, t as u64, 0));
        check_process_properties(&mut trace, which)
    });
    let mut rows = Vec::new();
    for (t, rep) in per.into_iter().enumerate() {
        for r in rep?.results {
            rows.push(Row::new("properties", n, seed, &format!("RP{}-{}", r.id, r.name), r.passed as u8 as f64).trial(t));
            rows.push(Row::new("properties", n, seed, &format!("RP{}-measured", r.id), r.measured).trial(t));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Hitting experiment

/// Per trial: `m₀`, `m₁`, the directed cycle at `m₁`, all patterns at `m₁+1`, all
/// non-directed patterns at `m₁`, and the direction-change window at `m₀`.
pub fn hitting_experiment(n: usize, trials: usize, seed: u64, jobs: usize) -> Result<Vec<Row>> {
    if n > ALL_PATTERNS_CAP {
        return Err(Error::input(format!("hitting experiment needs n ≤ {ALL_PATTERNS_CAP}, got {n}")));
    }
    if n < 3 {
        return Err(Error::input("hitting experiment needs n ≥ 3"));
    }
    let classes = canonical_classes(n);
    let directed = OrientationPattern::directed(n)?;
    let per: Vec<Result<Vec<Row>>> = par_trials(trials, jobs, |t| {
        let mut trace = sample_process(n, trial_rng(seed, t as u64, 0));
        let st = hitting_times(&mut trace)?;
        let (m0, m1) = (st.m0.expect("n ≥ 3"), st.m1.expect("n ≥ 3"));
        let row = |metric: &str, v: f64| Row::new("hitting", n, seed, metric, v).trial(t);
        let mut rows = vec![row("m0", m0 as f64).at(m0), row("m1", m1 as f64).at(m1)];
        let d1 = trace.prefix(m1)?;
        let absent = find_embedding(&d1, &directed, &[])?.is_none();
        rows.push(row("directed_absent_at_m1", absent as u8 as f64).at(m1));
        let all_nd = contains_all_patterns(&d1, &[directed.clone()])?;
        rows.push(row("all_nondirected_at_m1", all_nd.all_contained as u8 as f64).at(m1));
        let d2 = trace.prefix(m1 + 1)?;
        let all = contains_all_patterns(&d2, &[])?;
        rows.push(row("all_at_m1_plus_1", all.all_contained as u8 as f64).at(m1 + 1));
        // Patterns whose direction changes lie in [1+(s−1)ln n, n−1−(t−1)ln n] at m₀.
        let ln = (n as f64).ln();
        let (s, tt) = (st.s[m0] as f64, st.t[m0] as f64);
        let (lo, hi) = (1.0 + (s - 1.0) * ln, n as f64 - 1.0 - (tt - 1.0) * ln);
        let outside: Vec<OrientationPattern> = classes
            .iter()
            .filter(|c| {
                let ch = c.direction_changes() as f64;
                ch < lo || ch > hi
            })
            .cloned()
            .collect();
        let d0 = trace.prefix(m0)?;
        let ranged = contains_all_patterns(&d0, &outside)?;
        rows.push(row("in_range_classes_at_m0", ranged.classes_required as f64).at(m0));
        rows.push(row("in_range_contained_at_m0", ranged.all_contained as u8 as f64).at(m0));
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per {
        rows.extend(r?);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Threshold scan

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Engine {
    Oracle,
    Pipeline,
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Engine::Oracle),
            "pipeline" => Ok(Engine::Pipeline),
            other => Err(Error::input(format!("unknown engine {other:?}; use oracle or pipeline"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Oracle => "oracle",
            Engine::Pipeline => "pipeline",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub p: f64,
    pub successes: usize,
    pub trials: usize,
    pub frequency: f64,
    pub p_c: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// `count` evenly spaced values from `lo` to `hi` inclusive, parsed from `lo:hi:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::input(format!("grid {spec:?} must look like lo:hi:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count == 0 || !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}

/// The pipeline engine on `D`: the sprinkle is drawn from the 2-cycles of `D` itself, so
/// any embedding found lies in `D`.
fn pipeline_contains(d: &Digraph, c: &OrientationPattern, params: &PipelineParams, rng: &mut crate::rng::StreamRng) -> bool {
    let n = d.n();
    let mut g1 = UGraph::new(n);
    let mut stream2 = Vec::new();
    for u in 0..n {
        for v in d.adj(u, Sign::Out).iter().filter(|&v| v > u) {
            if d.has_edge(v, u) {
                if rng.gen_bool(0.5) {
                    g1.add_edge(u, v);
                } else {
                    stream2.push((u, v));
                }
            }
        }
    }
    let sp = Sprinkle { g1, stream2 };
    let w = Window { start: 0, len: params.window_len(n) };
    matches!(embed_cycle(d, &[], c, w, &[], &sp, params, rng), Ok(o) if o.embedding.is_some())
}

#[allow(clippy::too_many_arguments)]
pub fn threshold_scan(
    c: &OrientationPattern,
    n: usize,
    grid: &[f64],
    trials: usize,
    engine: Engine,
    seed: u64,
    params: &PipelineParams,
    jobs: usize,
) -> Result<Vec<ThresholdPoint>> {
    if c.len() != n {
        return Err(Error::input(format!("pattern has length {}, expected {n}", c.len())));
    }
    if engine == Engine::Oracle && n > EMBED_CAP {
        return Err(Error::input(format!("oracle engine needs n ≤ {EMBED_CAP}")));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::input(format!("probability {p} outside [0,1]")));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p_c = c.p_threshold();
    let mut out = Vec::with_capacity(grid.len());
    for (g, &p) in grid.iter().enumerate() {
        let hits: Vec<Result<bool>> = par_trials(trials, jobs, |t| {
            let mut rng = stream_rng(seed, ((g as u64) << 32) | t as u64);
            let d = sample_dnp(n, p, &mut rng)?;
            match engine {
                Engine::Oracle => Ok(find_embedding(&d, c, &[])?.is_some()),
                Engine::Pipeline => Ok(pipeline_contains(&d, c, params, &mut rng)),
            }
        });
        let mut k = 0;
        for h in hits {
            k += h? as usize;
        }
        let (lo, hi) = wilson(k, trials, 0.95);
        out.push(ThresholdPoint {
            p,
            successes: k,
            trials,
            frequency: if trials == 0 { 0.0 } else { k as f64 / trials as f64 },
            p_c,
            wilson_low: lo,
            wilson_high: hi,
        });
    }
    Ok(out)
}

/// One row per grid point; the pattern column carries the pattern and its `p_C`.
pub fn threshold_rows(c: &OrientationPattern, n: usize, seed: u64, points: &[ThresholdPoint]) -> Vec<Row> {
    points
        .iter()
        .map(|pt| {
            let mut r = Row::new("threshold", n, seed, "frequency", pt.frequency);
            r.p = Some(pt.p);
            r.pattern = format!("{c}@pc={:.6}", pt.p_c);
            r
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Coupling marginals

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingMarginals {
    pub samples: usize,
    /// Per pair, fit of `D̂₀` against `D*(n,p)` cells `(00, 01, 10, 11)`.
    pub start: Vec<ChiSquare>,
    /// Per pair, fit of `D̂_ℓ` against `D(n,p)`.
    pub end: Vec<ChiSquare>,
    /// Every consecutive pair of chain states differs only inside its own vertex pair.
    pub locality_ok: bool,
}

pub fn coupling_marginals(n: usize, p: f64, samples: usize, seed: u64, jobs: usize) -> Result<CouplingMarginals> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("probability {p} outside [0,1]")));
    }
    let pairs = crate::models::unordered_pairs(n);
    let l = pairs.len();
    let per: Vec<(Vec<[usize; 2]>, bool)> = par_trials(samples, jobs, |t| {
        let mut rng = trial_rng(seed, t as u64, 0);
        let r = CouplingRandomness::sample(n, p, &mut rng).expect("p checked");
        let chain: Vec<Digraph> = (0..=l).map(|j| coupling_chain(&r, j).unwrap()).collect();
        let mut local = true;
        for j in 0..l {
            for (q, &(x, y)) in pairs.iter().enumerate() {
                if q == j {
                    continue;
                }
                local &= chain[j].has_edge(x, y) == chain[j + 1].has_edge(x, y)
                    && chain[j].has_edge(y, x) == chain[j + 1].has_edge(y, x);
            }
        }
        let cell = |d: &Digraph, x: usize, y: usize| 2 * d.has_edge(x, y) as usize + d.has_edge(y, x) as usize;
        let cells = pairs.iter().map(|&(x, y)| [cell(&chain[0], x, y), cell(&chain[l], x, y)]).collect();
        (cells, local)
    });
    let mut start_counts = vec![[0u64; 4]; l];
    let mut end_counts = vec![[0u64; 4]; l];
    let mut locality_ok = true;
    for (cells, local) in &per {
        locality_ok &= local;
        for (q, c) in cells.iter().enumerate() {
            start_counts[q][c[0]] += 1;
            end_counts[q][c[1]] += 1;
        }
    }
    let star = [1.0 - p, 0.0, 0.0, p];
    let indep = [(1.0 - p) * (1.0 - p), (1.0 - p) * p, p * (1.0 - p), p * p];
    Ok(CouplingMarginals {
        samples,
        start: start_counts.iter().map(|c| chi_square_gof(c, &star)).collect::<Result<_>>()?,
        end: end_counts.iter().map(|c| chi_square_gof(c, &indep)).collect::<Result<_>>()?,
        locality_ok,
    })
}

pub fn coupling_rows(n: usize, p: f64, seed: u64, m: &CouplingMarginals) -> Vec<Row> {
    let mut rows = Vec::new();
    for (name, fits) in [("start", &m.start), ("end", &m.end)] {
        for (q, f) in fits.iter().enumerate() {
            let mut r = Row::new("coupling", n, seed, &format!("{name}_chi2_pvalue"), f.p_value);
            r.p = Some(p);
            r.i = Some(q);
            rows.push(r);
        }
    }
    let mut r = Row::new("coupling", n, seed, "locality_ok", m.locality_ok as u8 as f64);
    r.p = Some(p);
    rows.push(r);
    rows
}
