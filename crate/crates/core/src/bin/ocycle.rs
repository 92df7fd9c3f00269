use clap::{Args, Parser, Subcommand, ValueEnum};
use oriented_cycles::adapter::process_embed;
use oriented_cycles::embedding::Embedding;
use oriented_cycles::experiments::{
    coupling_marginals, coupling_rows, hitting_experiment, parse_grid, property_experiment, rows_to_csv,
    rows_to_json, threshold_rows, threshold_scan, Engine, Row,
};
use oriented_cycles::graph::{AnyGraph, Digraph, UGraph};
use oriented_cycles::models::{sample_dnp, sample_dstar, sample_gnp};
use oriented_cycles::oracle::find_embedding;
use oriented_cycles::params::PipelineParams;
use oriented_cycles::pattern::OrientationPattern;
use oriented_cycles::pipeline::{embed_cycle, Sprinkle, Window};
use oriented_cycles::posa::posa_ham_path;
use oriented_cycles::process::{sample_process, ProcessTrace};
use oriented_cycles::pseudo::check_pseudorandom;
use oriented_cycles::rng::{stream_rng, SEED_ENV};
use oriented_cycles::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ocycle", version, about = "Oriented Hamilton cycles in random digraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Global seed; every trial derives its own stream from it.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Number of seeded trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Parameter profile.
    #[arg(long, default_value = "paper", value_parser = ["paper", "desk"])]
    profile: String,
    /// key=value file overriding profile constants.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trial-level parallelism (0 = all cores).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Row format for experiment output.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Dnp,
    Gnp,
    Dstar,
    Process,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a random graph or a full process trace.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        /// Edge probability (unused for the process).
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact search for a copy of a pattern, with optional pins.
    Embed {
        #[arg(long)]
        graph: PathBuf,
        /// Pattern string, file, or shorthand (directed:n, anti:n, random:n:changes:seed).
        #[arg(long)]
        pattern: String,
        /// Pin `pos=v`: position `pos` of the pattern must map to vertex `v`.
        #[arg(long = "pin")]
        pins: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the constructive embedding pipeline.
    Pipeline {
        #[command(subcommand)]
        action: PipelineAction,
    },
    /// Embed a pattern into a prefix of the random digraph process, or check process properties.
    Process {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        pattern: Option<String>,
        /// Prefix length; defaults to the first index with all total degrees at least 2.
        #[arg(long)]
        index: Option<usize>,
        /// Load the process order from a trace file instead of sampling it.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the sampled trace to this file.
        #[arg(long)]
        dump_trace: Option<PathBuf>,
        /// Write the embedding as `pos vertex` lines to this file.
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Comma-separated property ids (1-12); switches to property diagnostics over --trials processes.
        #[arg(long, value_delimiter = ',')]
        properties: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Hitting-time experiment with the exact all-patterns oracle.
    Hitting {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Containment frequency of a pattern in D(n,p) across a probability grid.
    Threshold {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        n: usize,
        /// `lo:hi:count`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "oracle")]
        engine: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check the three pseudorandomness conditions on a digraph.
    VerifyPseudo {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated exceptional vertices.
        #[arg(long, value_delimiter = ',')]
        x: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Hamilton x,y-path by rotation-extension with a sprinkled edge stream.
    Posa {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        /// Sprinkle intensity `c` in G(n, c ln n / n).
        #[arg(long, default_value_t = 2.0)]
        sprinkle: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Edge-pair marginals of the decoupling chain.
    Coupling {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum PipelineAction {
    /// Sample D₀ = D(n, c ln n / n) and a sprinkle, then embed the pattern.
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pattern: String,
        /// Intensity `c` of D₀.
        #[arg(long, default_value_t = 20.0)]
        density: f64,
        /// Write the embedding as `pos vertex` lines to this file.
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

enum Outcome {
    Found,
    Absent,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_rows(common: &Common, rows: &[Row]) -> Result<()> {
    let text = match common.format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => rows_to_json(rows),
    };
    emit(common, &text)
}

fn params(common: &Common) -> Result<PipelineParams> {
    let mut p = PipelineParams::by_name(&common.profile)?;
    if let Some(path) = &common.params {
        let text = read(path)?;
        let with_profile = if text.lines().any(|l| l.trim_start().starts_with("profile")) {
            text
        } else {
            format!("profile = {}\n{text}", common.profile)
        };
        p = PipelineParams::from_config(&with_profile)?;
    }
    p.validate()?;
    Ok(p)
}

fn pattern(spec: &str) -> Result<OrientationPattern> {
    let path = PathBuf::from(spec);
    if path.is_file() {
        return OrientationPattern::parse(read(&path)?.trim());
    }
    OrientationPattern::parse(spec)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn embedding_lines(e: &Embedding) -> String {
    e.to_lines()
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.cmd {
        Cmd::Gen { model, n, p, common } => {
            let mut rng = stream_rng(common.seed, 0);
            let text = match model {
                Model::Dnp => sample_dnp(n, p, &mut rng)?.to_edge_list(),
                Model::Gnp => sample_gnp(n, p, &mut rng)?.to_edge_list(),
                Model::Dstar => sample_dstar(n, p, &mut rng)?.to_edge_list(),
                Model::Process => sample_process(n, rng).to_text(),
            };
            emit(&common, &text)?;
            Ok(Outcome::Found)
        }
        Cmd::Embed { graph, pattern: pat, pins, common } => {
            let d = AnyGraph::parse(&read(&graph)?)?.into_digraph();
            let c = pattern(&pat)?;
            let pins = pins
                .iter()
                .map(|s| {
                    let (a, b) = s.split_once('=').ok_or_else(|| Error::input(format!("pin {s:?} must be pos=v")))?;
                    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::input(format!("bad pin {s:?}")));
                    Ok((num(a)?, num(b)?))
                })
                .collect::<Result<Vec<_>>>()?;
            match find_embedding(&d, &c, &pins)? {
                Some(e) => {
                    emit(&common, &embedding_lines(&e))?;
                    Ok(Outcome::Found)
                }
                None => Ok(Outcome::Absent),
            }
        }
        Cmd::Pipeline { action: PipelineAction::Run { n, pattern: pat, density, embedding, common } } => {
            let params = params(&common)?;
            let c = pattern(&pat)?;
            if c.len() != n {
                return Err(Error::input(format!("pattern has length {}, --n is {n}", c.len())));
            }
            let mut rng = stream_rng(common.seed, 0);
            let q = (density * (n as f64).ln() / n as f64).min(1.0);
            let d0 = sample_dnp(n, q, &mut rng)?;
            let sp = Sprinkle::sample(n, &params, None, &mut rng)?;
            let w = Window { start: 0, len: params.window_len(n) };
            let out = embed_cycle(&d0, &[], &c, w, &[], &sp, &params, &mut rng)?;
            emit(&common, &json(&out.report))?;
            match &out.embedding {
                Some(e) => {
                    if let Some(path) = embedding {
                        write(&path, &embedding_lines(e))?;
                    }
                    Ok(Outcome::Found)
                }
                None => Ok(Outcome::Absent),
            }
        }
        Cmd::Process { n, pattern: pat, index, trace, dump_trace, embedding, properties, common } => {
            if !properties.is_empty() {
                let n = n.ok_or_else(|| Error::input("--n is required with --properties"))?;
                let rows = property_experiment(n, common.trials, common.seed, &properties, common.jobs)?;
                emit_rows(&common, &rows)?;
                return Ok(Outcome::Found);
            }
            let params = params(&common)?;
            let mut tr = match &trace {
                Some(p) => ProcessTrace::parse(&read(p)?)?,
                None => {
                    let n = n.ok_or_else(|| Error::input("--n or --trace is required"))?;
                    sample_process(n, stream_rng(common.seed, 0))
                }
            };
            if let Some(n) = n {
                if n != tr.n() {
                    return Err(Error::input(format!("--n {n} disagrees with the trace ({})", tr.n())));
                }
            }
            if let Some(p) = &dump_trace {
                write(p, &tr.to_text())?;
            }
            let c = pattern(pat.as_deref().ok_or_else(|| Error::input("--pattern is required"))?)?;
            let i = match index {
                Some(i) => i,
                None => {
                    let st = oriented_cycles::experiments::hitting_times(&mut tr)?;
                    st.m0.ok_or_else(|| Error::input("the process never reaches total degree 2"))?
                }
            };
            let mut rng = stream_rng(common.seed, 1);
            let out = process_embed(&mut tr, i, &c, &params, &mut rng)?;
            emit(&common, &json(&out.report))?;
            match &out.embedding {
                Some(e) => {
                    if let Some(path) = embedding {
                        write(&path, &embedding_lines(e))?;
                    }
                    Ok(Outcome::Found)
                }
                None => Ok(Outcome::Absent),
            }
        }
        Cmd::Hitting { n, common } => {
            let rows = hitting_experiment(n, common.trials, common.seed, common.jobs)?;
            emit_rows(&common, &rows)?;
            Ok(Outcome::Found)
        }
        Cmd::Threshold { pattern: pat, n, grid, engine, common } => {
            let engine: Engine = engine.parse()?;
            let c = pattern(&pat)?;
            let grid = parse_grid(&grid)?;
            let params = params(&common)?;
            let pts = threshold_scan(&c, n, &grid, common.trials, engine, common.seed, &params, common.jobs)?;
            emit_rows(&common, &threshold_rows(&c, n, common.seed, &pts))?;
            Ok(Outcome::Found)
        }
        Cmd::VerifyPseudo { graph, x, common } => {
            let d: Digraph = AnyGraph::parse(&read(&graph)?)?.into_digraph();
            let params = params(&common)?;
            let rep = check_pseudorandom(&d, &x, &params)?;
            emit(&common, &json(&rep))?;
            Ok(if rep.passed() { Outcome::Found } else { Outcome::Absent })
        }
        Cmd::Posa { graph, x, y, sprinkle, common } => {
            let g = match AnyGraph::parse(&read(&graph)?)? {
                AnyGraph::Undirected(g) => g,
                AnyGraph::Directed(d) => d.underlying(),
            };
            let n = g.n();
            let mut rng = stream_rng(common.seed, 0);
            let q = (sprinkle * (n as f64).ln() / n as f64).min(1.0);
            let mut stream: Vec<(usize, usize)> = sample_gnp(n, q, &mut rng)?.edges();
            rand::seq::SliceRandom::shuffle(stream.as_mut_slice(), &mut rng);
            let mut it = stream.into_iter();
            match posa_ham_path(&g, x, y, &mut it, usize::MAX)? {
                Some(out) => {
                    let mut host: UGraph = g.clone();
                    for &(u, v) in &out.consumed {
                        host.add_edge(u, v);
                    }
                    let ok = out.path.len() == n && out.path.windows(2).all(|w| host.has_edge(w[0], w[1]));
                    if !ok {
                        return Err(Error::Stage { stage: "posa".into(), detail: "path failed replay".into() });
                    }
                    let text: String = out.path.iter().map(|v| format!("{v}\n")).collect();
                    emit(&common, &text)?;
                    Ok(Outcome::Found)
                }
                None => Ok(Outcome::Absent),
            }
        }
        Cmd::Coupling { n, p, common } => {
            let m = coupling_marginals(n, p, common.trials, common.seed, common.jobs)?;
            emit_rows(&common, &coupling_rows(n, p, common.seed, &m))?;
            Ok(Outcome::Found)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Found) => ExitCode::SUCCESS,
        Ok(Outcome::Absent) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ocycle: {e}");
            ExitCode::from(if e.is_input() { 2 } else { 1 })
        }
    }
}
