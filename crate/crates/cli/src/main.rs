//! `kgreason`: mine, extract, reason, evaluate, serve.
//!
//! JSON goes to stdout (or `--out`), a short summary to stderr.
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numerical error.

use std::fs;
use std::io::{self, BufReader, Write};
use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kgreason::collective::{reason_collective, CollectiveParams, OverlapSource, PairStatus};
use kgreason::eval::{evaluate, read_cases};
use kgreason::mining::{compute_predicate_stats, compute_similarity_model, CooccurrenceMode, PredicateSimilarityModel};
use kgreason::pairwise::{reason_pair, Membership, OppositionTable, ReasonParams};
use kgreason::query::{Clue, QueryGraph, QueryInput};
use kgreason::segment::{
    extract_edge_segment, extract_node_segment, extract_subgraph_segment, EdgeParams, NibbleParams,
    NodeSegmentJson, SegmentJson, SubgraphJson, WeightedView,
};
use kgreason::store::{KnowledgeGraph, LoadConfig};
use kgreason::ErrorClass;
use kgreason_service::{AppState, ServiceConfig, Snapshot};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kgreason", version, about = "Knowledge segment extraction and comparative reasoning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine predicate entropy weights and the similarity model from a graph.
    Mine(MineArgs),
    /// Extract a knowledge segment.
    #[command(subcommand)]
    Ks(KsCommand),
    /// Comparative reasoning over clues.
    #[command(subcommand)]
    Reason(ReasonCommand),
    /// Accuracy over a labelled JSON-lines query file.
    Eval(EvalArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum KsCommand {
    /// Node-specific segment around a seed entity.
    Node(NodeArgs),
    /// Edge-specific segment for one clue.
    Edge(EdgeArgs),
    /// Subgraph-specific segment for a query graph.
    Subgraph(SubgraphArgs),
}

#[derive(Subcommand)]
enum ReasonCommand {
    /// Pairwise reasoning over two clues.
    Pair(PairArgs),
    /// Collective reasoning over a query graph.
    Collective(CollectiveArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Tab-separated triples.
    #[arg(long, env = "KGREASON_GRAPH")]
    graph: PathBuf,
    /// Optional `entity<TAB>type` file; types become extra node attributes.
    #[arg(long)]
    types: Option<PathBuf>,
    /// Fail on malformed lines instead of skipping them.
    #[arg(long)]
    strict: bool,
    /// Lowercase all labels.
    #[arg(long)]
    lowercase: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Model file written by `mine`.
    #[arg(long, env = "KGREASON_MODEL")]
    model: PathBuf,
}

#[derive(Args)]
struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = Mode::Pairs)]
    cooccurrence: Mode,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Pairs,
    Documents,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weighting {
    /// Entropy weights stored in the model.
    Model,
    /// Entropy weights mined from the graph now.
    Mined,
    Uniform,
}

#[derive(Args)]
struct NodeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    seed: String,
    #[arg(long, default_value_t = NibbleParams::default().alpha)]
    alpha: f64,
    #[arg(long, default_value_t = NibbleParams::default().epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = NibbleParams::default().max_size)]
    max_size: usize,
    #[arg(long, value_enum, default_value_t = Weighting::Model)]
    weighting: Weighting,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PathArgs {
    /// Number of cheapest paths per clue.
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    /// Also walk triples object -> subject.
    #[arg(long)]
    bidirectional: bool,
    /// Allow the clue triple itself on the paths.
    #[arg(long)]
    keep_clue: bool,
}

impl PathArgs {
    fn params(&self) -> EdgeParams {
        EdgeParams {
            k: self.k,
            bidirectional: self.bidirectional,
            exclude_clue: !self.keep_clue,
        }
    }
}

#[derive(Args)]
struct EdgeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `subject|predicate|object`.
    #[arg(long)]
    triple: String,
    #[command(flatten)]
    paths: PathArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct QueryArgs {
    /// JSON file: a list of triples or `{nodes, edges}`.
    #[arg(long, conflicts_with = "triple")]
    query: Option<PathBuf>,
    /// `subject|predicate|object`, repeated once per query edge.
    #[arg(long)]
    triple: Vec<String>,
}

impl QueryArgs {
    fn load(&self) -> Result<QueryGraph> {
        if let Some(path) = &self.query {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let q: QueryInput = serde_json::from_str(&text)
                .map_err(|e| kgreason::Error::InvalidQuery(format!("{}: {e}", path.display())))?;
            return Ok(q.into_graph());
        }
        if self.triple.is_empty() {
            bail!(Usage("give --query or at least one --triple".into()));
        }
        let clues = self.triple.iter().map(|t| Clue::parse(t)).collect::<kgreason::Result<Vec<_>>>()?;
        Ok(QueryGraph::from_clues(&clues))
    }
}

#[derive(Args)]
struct SubgraphArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    paths: PathArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ReasonArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Tab-separated opposite predicate pairs; the bundled table by default.
    #[arg(long)]
    opposites: Option<PathBuf>,
    /// JSON file with reasoning parameters; flags below override it.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(short, long)]
    k: Option<usize>,
    /// Walk triples in one direction only.
    #[arg(long)]
    directed: bool,
    /// Key elements count when present anywhere in the other segment.
    #[arg(long)]
    segment_membership: bool,
}

impl ReasonArgs {
    fn opposites(&self) -> Result<OppositionTable> {
        Ok(match &self.opposites {
            Some(p) => OppositionTable::load(p)?,
            None => OppositionTable::builtin(),
        })
    }

    fn params(&self) -> Result<CollectiveParams> {
        let mut params: CollectiveParams = match &self.params {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| kgreason::Error::InvalidParameter(format!("{}: {e}", p.display())))?
            }
            None => CollectiveParams::default(),
        };
        let r: &mut ReasonParams = &mut params.reason;
        if let Some(k) = self.k {
            r.k = k;
        }
        if self.directed {
            r.bidirectional = false;
        }
        if self.segment_membership {
            r.membership = Membership::Segment;
        }
        Ok(params)
    }
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    reason: ReasonArgs,
    #[arg(long)]
    t1: String,
    #[arg(long)]
    t2: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Pair,
    Loss,
}

#[derive(Args)]
struct CollectiveArgs {
    #[command(flatten)]
    reason: ReasonArgs,
    #[command(flatten)]
    query: QueryArgs,
    /// Influence used to pick the compared key elements.
    #[arg(long, value_enum)]
    overlap_source: Option<Source>,
    /// Stop at the first inconsistent pair.
    #[arg(long)]
    early_exit: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    reason: ReasonArgs,
    /// JSON lines: `{"queries": [...], "label": "consistent"|"inconsistent", "category": ...}`.
    #[arg(long)]
    queries: PathBuf,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<NonZeroUsize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    opposites: Option<PathBuf>,
    #[arg(long, env = "KGREASON_HOST", default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[arg(long, env = "KGREASON_PORT", default_value_t = 8080)]
    port: u16,
    /// Response cache entries; 0 disables the cache.
    #[arg(long, env = "KGREASON_CACHE_SIZE", default_value_t = 1024)]
    cache_size: usize,
    /// Seconds before a request is turned into a polled job.
    #[arg(long, default_value_t = 2.0)]
    job_after: f64,
}

/// Bad flag combination; exits with 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load_graph(args: &GraphArgs) -> Result<KnowledgeGraph> {
    let config = LoadConfig {
        strict: args.strict,
        lowercase_labels: args.lowercase,
    };
    let (mut graph, report) = KnowledgeGraph::load_tsv(&args.graph, &config)?;
    if !report.malformed.is_empty() {
        eprintln!("skipped {} malformed line(s), first at line {}", report.malformed.len(), report.malformed[0]);
    }
    if let Some(types) = &args.types {
        let n = graph.load_types(types)?;
        eprintln!("attached {n} type(s)");
    }
    Ok(graph)
}

fn load(args: &ModelArgs) -> Result<(KnowledgeGraph, PredicateSimilarityModel)> {
    let graph = load_graph(&args.graph)?;
    let model = PredicateSimilarityModel::load(&args.model)?;
    Ok((graph, model))
}

fn emit<T: Serialize>(out: &OutArgs, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &out.out {
        Some(path) => write_file(path, &text),
        None => {
            emit_raw(&text)
        }
    }
}

fn emit_raw(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn mine(args: &MineArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let stats = compute_predicate_stats(&graph);
    let mode = match args.cooccurrence {
        Mode::Pairs => CooccurrenceMode::Pairs,
        Mode::Documents => CooccurrenceMode::Documents,
    };
    let model = compute_similarity_model(&graph, &stats, mode);
    eprintln!(
        "{} entities, {} triples, {} predicates ({} degenerate)",
        graph.entity_count(),
        graph.triple_count(),
        model.len(),
        model.degenerate_predicates().len()
    );
    let text = model.to_json();
    match &args.out.out {
        Some(path) => write_file(path, &text),
        None => emit_raw(&text),
    }
}

fn ks(cmd: &KsCommand) -> Result<()> {
    match cmd {
        KsCommand::Node(a) => {
            let (graph, model) = load(&a.model)?;
            let stats;
            let view = match a.weighting {
                Weighting::Model => WeightedView::from_model(&graph, &model),
                Weighting::Mined => {
                    stats = compute_predicate_stats(&graph);
                    WeightedView::from_stats(&graph, &stats)
                }
                Weighting::Uniform => WeightedView::uniform(&graph),
            };
            let params = NibbleParams {
                alpha: a.alpha,
                epsilon: a.epsilon,
                max_size: a.max_size,
            };
            let seg = extract_node_segment(&view, &a.seed, &params)?;
            if seg.segment.empty {
                eprintln!("warning: {}", kgreason::Error::EmptySegment(a.seed.clone()));
            }
            eprintln!(
                "{} nodes, {} edges, conductance {:.4}",
                seg.segment.node_count(),
                seg.segment.edge_count(),
                seg.conductance
            );
            emit(&a.out, &NodeSegmentJson::new(&graph, &seg))
        }
        KsCommand::Edge(a) => {
            let (graph, model) = load(&a.model)?;
            let clue = Clue::parse(&a.triple)?;
            let seg = extract_edge_segment(&graph, &model, &clue, &a.paths.params())?;
            eprintln!("{} path(s), costs {:?}", seg.paths.len(), seg.costs());
            emit(&a.out, &SegmentJson::from_edge_segment(&graph, &seg))
        }
        KsCommand::Subgraph(a) => {
            let (graph, model) = load(&a.model)?;
            let query = a.query.load()?;
            let seg = extract_subgraph_segment(&graph, &model, &query, &a.paths.params())?;
            for e in seg.edges.iter().filter(|e| !e.is_ok()) {
                eprintln!("warning: no path for query edge {} {}", e.edge, e.clue);
            }
            eprintln!("merged: {} nodes, {} edges", seg.merged.node_count(), seg.merged.edge_count());
            emit(&a.out, &SubgraphJson::new(&graph, &seg))
        }
    }
}

fn reason(cmd: &ReasonCommand) -> Result<()> {
    match cmd {
        ReasonCommand::Pair(a) => {
            let (graph, model) = load(&a.reason.model)?;
            let params = a.reason.params()?;
            let (t1, t2) = (Clue::parse(&a.t1)?, Clue::parse(&a.t2)?);
            let v = reason_pair(&graph, &model, &t1, &t2, &a.reason.opposites()?, &params.reason)?;
            let overlap = v.overlap_rate.map(|o| format!(", overlap {:.3}", o.mean)).unwrap_or_default();
            eprintln!(
                "case {}{overlap}: {}",
                v.case,
                if v.inconsistent { "inconsistent" } else { "no inconsistency found" }
            );
            emit(&a.out, &v)
        }
        ReasonCommand::Collective(a) => {
            let (graph, model) = load(&a.reason.model)?;
            let mut params = a.reason.params()?;
            if let Some(s) = a.overlap_source {
                params.overlap_source = match s {
                    Source::Pair => OverlapSource::Pair,
                    Source::Loss => OverlapSource::Loss,
                };
            }
            params.early_exit |= a.early_exit;
            let query = a.query.load()?;
            let v = reason_collective(&graph, &model, &query, &params)?;
            for p in &v.pairs {
                if p.status != PairStatus::Unrelated {
                    eprintln!("edges {:?}: {:?} (overlap {:.3})", p.edges, p.status, p.overlap.mean);
                }
            }
            eprintln!("{}", if v.inconsistent { "inconsistent" } else { "no inconsistency found" });
            emit(&a.out, &v)
        }
    }
}

fn eval(a: &EvalArgs) -> Result<()> {
    let (graph, model) = load(&a.reason.model)?;
    let params = a.reason.params()?;
    let file = fs::File::open(&a.queries).with_context(|| format!("reading {}", a.queries.display()))?;
    let cases = read_cases(BufReader::new(file))?;
    let report = evaluate(&graph, &model, &a.reason.opposites()?, &params, &cases, a.threads);
    for (cat, acc) in &report.categories {
        eprintln!("{cat}: {}/{} = {:.3}", acc.correct, acc.total, acc.accuracy);
    }
    let o = &report.overall;
    eprintln!("overall: {}/{} = {:.3}", o.correct, o.total, o.accuracy);
    emit(&a.out, &report)
}

fn serve(a: &ServeArgs) -> Result<()> {
    let (graph, model) = load(&a.model)?;
    let opposites = match &a.opposites {
        Some(p) => OppositionTable::load(p)?,
        None => OppositionTable::builtin(),
    };
    if !(a.job_after >= 0.0 && a.job_after.is_finite()) {
        bail!(Usage(format!("--job-after must be a non-negative number of seconds, got {}", a.job_after)));
    }
    let config = ServiceConfig {
        cache_size: a.cache_size,
        job_after: std::time::Duration::from_secs_f64(a.job_after),
    };
    let state = AppState::new(Snapshot::new(graph, model, opposites), config);
    let addr = SocketAddr::new(a.host, a.port);
    eprintln!("serving on http://{addr}");
    tokio::runtime::Runtime::new()?.block_on(kgreason_service::serve(addr, state))?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<kgreason::Error>().map(kgreason::Error::class) {
        Some(ErrorClass::Numerical) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(io::stderr)
        .init();
    let result = match &cli.command {
        Command::Mine(a) => mine(a),
        Command::Ks(c) => ks(c),
        Command::Reason(c) => reason(c),
        Command::Eval(a) => eval(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
