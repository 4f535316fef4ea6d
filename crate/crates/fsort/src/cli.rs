//! Command-line front end: generate instances, run single sorts, sweep
//! benchmark grids.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::detsort::{self, NodeTrace};
use crate::graph::{pairs_of, ComparisonGraph, GraphError};
use crate::oracle::{HiddenOrder, OracleError, ProbeOracle};
use crate::reference::{self, edge_density, ground_truth, Algorithm, RunReport};
use crate::{randsort, SortError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Order(#[from] OracleError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fsort",
    about = "Sorting with forbidden comparison pairs: instance generation, probe-counting sort runs, benchmark sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a comparison-graph instance (and optionally a hidden order).
    Gen(GenArgs),
    /// Sort one instance and print a verified run report as JSON.
    Sort(SortArgs),
    /// Sweep a parameter grid and emit one verified row per run.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Exact number of forbidden pairs (mutually exclusive with --p).
    #[arg(long, conflicts_with = "p")]
    q: Option<usize>,
    /// Edge probability for a G(n,p) instance.
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a random hidden order to this file.
    #[arg(long)]
    order_out: Option<PathBuf>,
    /// Seed for the hidden order (defaults to a value derived from --seed).
    #[arg(long)]
    order_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SortArgs {
    /// Algorithm: det, peel, rand or randgraph.
    #[arg(long)]
    algo: Algorithm,
    /// Graph file in fsort format.
    #[arg(long)]
    graph: PathBuf,
    /// Hidden-order file (one line of space-separated ranks).
    #[arg(long, conflicts_with = "order_seed")]
    order: Option<PathBuf>,
    /// Generate the hidden order from this seed instead of a file.
    #[arg(long)]
    order_seed: Option<u64>,
    /// Algorithm seed (rand and randgraph).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Known edge probability for randgraph (defaults to the instance's
    /// edge density).
    #[arg(long)]
    p_in: Option<f64>,
    /// Write the resulting relation as JSON to this file.
    #[arg(long)]
    dump_poset: Option<PathBuf>,
    /// Dump covering pairs instead of the full relation.
    #[arg(long, requires = "dump_poset")]
    covers: bool,
    /// Emit per-node recursion traces (det only) as JSON lines on stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Algorithm: det, peel, rand or randgraph.
    #[arg(long)]
    algo: Algorithm,
    /// Grid axes like `n=128,256,512 q=0,n,4n` (or `p=0.01,0.1` for
    /// randgraph). q entries may be expressions in n: `4n`, `n^1.5`,
    /// `n^2/10`.
    #[arg(long, num_args = 1.., required = true)]
    grid: Vec<String>,
    /// Seeds per grid point (0..K-1).
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Base seed mixed into every derived instance/order/run seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    emit: String,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parse argv, dispatch, and map errors to the documented exit codes:
/// 0 ok, 1 usage or I/O failure, 2 verification failure.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Sort(args) => cmd_sort(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6b5f_73f3_42d8_5a2b, |acc, &p| {
        splitmix(acc ^ p.wrapping_mul(0x2545_f491_4f6c_dd1d))
    })
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let graph = match (args.q, args.p) {
        (Some(q), None) => ComparisonGraph::gen_random_forbidden(args.n, q, args.seed)?,
        (None, Some(p)) => ComparisonGraph::gen_gnp(args.n, p, args.seed)?,
        _ => {
            return Err(CliError::Usage(
                "gen requires exactly one of --q or --p".into(),
            ))
        }
    };
    match &args.output {
        Some(path) => graph.save_to_path(path)?,
        None => graph.save(io::stdout().lock())?,
    }
    if let Some(path) = &args.order_out {
        let seed = args
            .order_seed
            .unwrap_or_else(|| derive_seed(&[args.seed, 1]));
        HiddenOrder::random(args.n, seed).save_to_path(path)?;
    }
    Ok(())
}

struct SortOutcome {
    report: RunReport,
    order: crate::poset::PartialOrder,
    traces: Option<Vec<NodeTrace>>,
}

fn execute_sort(
    g: &ComparisonGraph,
    order: &HiddenOrder,
    algo: Algorithm,
    seed: u64,
    p_in: f64,
    want_trace: bool,
) -> Result<SortOutcome, SortError> {
    let truth = ground_truth(g, order);
    let mut oracle = ProbeOracle::new(g, order.clone());
    let start = std::time::Instant::now();
    let (result, traces) = match algo {
        Algorithm::Det if want_trace => {
            let (po, traces) = detsort::sort_deterministic_traced(g, &mut oracle)?;
            (po, Some(traces))
        }
        Algorithm::Det => (detsort::sort_deterministic(g, &mut oracle)?, None),
        Algorithm::Peel => (detsort::peel_sort(g, &mut oracle)?, None),
        Algorithm::Rand => (randsort::sort_randomized(g, &mut oracle, seed)?, None),
        Algorithm::RandGraph => (randsort::sort_random_graph(g, &mut oracle, p_in, seed)?, None),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let probes = oracle.probe_count();
    let bound = algo.bound_value(g.n(), g.q(), p_in);
    let report = RunReport {
        algo,
        n: g.n(),
        q: g.q(),
        seed,
        probes,
        bound,
        ratio: probes as f64 / bound.max(f64::MIN_POSITIVE),
        correct: result.equals(&truth),
        ms,
    };
    Ok(SortOutcome {
        report,
        order: result,
        traces,
    })
}

fn cmd_sort(args: SortArgs) -> Result<(), CliError> {
    let graph = ComparisonGraph::load_from_path(&args.graph)?;
    let order = match (&args.order, args.order_seed) {
        (Some(path), None) => HiddenOrder::load_from_path(path)?,
        (None, Some(seed)) => HiddenOrder::random(graph.n(), seed),
        (None, None) => {
            return Err(CliError::Usage(
                "sort requires --order FILE or --order-seed S".into(),
            ))
        }
        _ => unreachable!("clap enforces the conflict"),
    };
    if order.n() != graph.n() {
        return Err(CliError::Usage(format!(
            "order ranks {} vertices but the graph has {}",
            order.n(),
            graph.n()
        )));
    }
    let p_in = args.p_in.unwrap_or_else(|| edge_density(&graph));
    let outcome = execute_sort(&graph, &order, args.algo, args.seed, p_in, args.trace)?;

    if let Some(traces) = &outcome.traces {
        let mut err = io::stderr().lock();
        for t in traces {
            writeln!(err, "{}", serde_json::to_string(t).expect("trace serializes"))?;
        }
    }
    if let Some(path) = &args.dump_poset {
        let dump = outcome.order.dump(args.covers);
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, &dump).map_err(io::Error::other)?;
        w.flush()?;
    }
    println!(
        "{}",
        serde_json::to_string(&outcome.report).expect("report serializes")
    );
    if !outcome.report.correct {
        return Err(CliError::Verification(format!(
            "{} output differs from ground truth on {:?}",
            args.algo, args.graph
        )));
    }
    Ok(())
}

/// Parsed `--grid` axes: concrete n values, q expressions (evaluated per n)
/// and plain p values.
#[derive(Debug, Clone, Default)]
struct ParsedGrid {
    ns: Vec<usize>,
    q_exprs: Vec<String>,
    ps: Vec<f64>,
}

fn parse_grid(tokens: &[String]) -> Result<ParsedGrid, CliError> {
    let mut grid = ParsedGrid::default();
    for token in tokens {
        let (key, rest) = token
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("grid token {token:?} is not key=v[,v...]")))?;
        let values: Vec<String> = rest.split(',').map(str::to_owned).collect();
        if values.is_empty() || values.iter().any(String::is_empty) {
            return Err(CliError::Usage(format!("grid token {token:?} lists no values")));
        }
        match key {
            "n" => {
                grid.ns = values
                    .iter()
                    .map(|v| {
                        v.parse::<usize>()
                            .map_err(|_| CliError::Usage(format!("bad n value {v:?}")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            "q" => grid.q_exprs = values,
            "p" => {
                grid.ps = values
                    .iter()
                    .map(|v| {
                        v.parse::<f64>()
                            .map_err(|_| CliError::Usage(format!("bad p value {v:?}")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown grid axis {other:?} (expected n, q or p)"
                )))
            }
        }
    }
    if grid.ns.is_empty() {
        return Err(CliError::Usage("grid must include an n axis".into()));
    }
    Ok(grid)
}

/// Evaluate a q-axis entry at a concrete n. Accepts plain integers and
/// expressions of the form `[coef]n[^exp][/div]`, floored to an integer:
/// `0`, `300`, `n`, `4n`, `n^1.5`, `n^2/10`.
fn eval_q_expr(expr: &str, n: usize) -> Result<usize, CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad q expression {expr:?}: {why}"));
    let s = expr.trim();
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let n_pos = s.find('n').ok_or_else(|| bad("expected an integer or an expression in n"))?;
    let coef: f64 = if n_pos == 0 {
        1.0
    } else {
        s[..n_pos]
            .parse()
            .map_err(|_| bad("unparsable coefficient"))?
    };
    let mut rest = &s[n_pos + 1..];
    let mut exponent = 1.0f64;
    if let Some(stripped) = rest.strip_prefix('^') {
        let end = stripped.find('/').unwrap_or(stripped.len());
        exponent = stripped[..end]
            .parse()
            .map_err(|_| bad("unparsable exponent"))?;
        rest = &stripped[end..];
    }
    let mut divisor = 1.0f64;
    if let Some(stripped) = rest.strip_prefix('/') {
        divisor = stripped.parse().map_err(|_| bad("unparsable divisor"))?;
        if divisor <= 0.0 {
            return Err(bad("divisor must be positive"));
        }
        rest = "";
    }
    if !rest.is_empty() {
        return Err(bad("trailing characters"));
    }
    Ok((coef * (n as f64).powf(exponent) / divisor).floor() as usize)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    let randgraph = args.algo == Algorithm::RandGraph;
    if randgraph && grid.ps.is_empty() {
        return Err(CliError::Usage("randgraph bench needs a p axis".into()));
    }
    if !randgraph && grid.q_exprs.is_empty() {
        return Err(CliError::Usage(format!(
            "{} bench needs a q axis",
            args.algo
        )));
    }

    let mut reports: Vec<RunReport> = Vec::new();
    for &n in &grid.ns {
        let points: Vec<(Option<usize>, Option<f64>)> = if randgraph {
            grid.ps.iter().map(|&p| (None, Some(p))).collect()
        } else {
            grid.q_exprs
                .iter()
                .map(|expr| Ok((Some(eval_q_expr(expr, n)?), None)))
                .collect::<Result<_, CliError>>()?
        };
        for (q, p) in points {
            for seed_idx in 0..args.seeds {
                let point_tag = q.map(|q| q as u64).unwrap_or_else(|| p.unwrap().to_bits());
                let instance_seed = derive_seed(&[args.seed, n as u64, point_tag, seed_idx, 0]);
                let order_seed = derive_seed(&[args.seed, n as u64, point_tag, seed_idx, 1]);
                let run_seed = derive_seed(&[args.seed, n as u64, point_tag, seed_idx, 2]);

                let graph = match (q, p) {
                    (Some(q), _) => {
                        if q > pairs_of(n) {
                            return Err(CliError::Usage(format!(
                                "grid point q={q} exceeds C({n},2)={}",
                                pairs_of(n)
                            )));
                        }
                        ComparisonGraph::gen_random_forbidden(n, q, instance_seed)?
                    }
                    (None, Some(p)) => ComparisonGraph::gen_gnp(n, p, instance_seed)?,
                    _ => unreachable!(),
                };
                let order = HiddenOrder::random(n, order_seed);
                let p_in = p.unwrap_or_else(|| edge_density(&graph));
                let report =
                    reference::verify_run_with_p(&graph, &order, args.algo, run_seed, p_in)?;
                let correct = report.correct;
                reports.push(report);
                if !correct {
                    emit_reports(&reports, &args)?;
                    return Err(CliError::Verification(format!(
                        "{} output differs from ground truth at n={n} seed index {seed_idx}",
                        args.algo
                    )));
                }
            }
        }
    }
    emit_reports(&reports, &args)
}

fn emit_reports(reports: &[RunReport], args: &BenchArgs) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    if args.emit == "json" {
        serde_json::to_writer_pretty(&mut sink, reports).map_err(io::Error::other)?;
        writeln!(sink)?;
    } else {
        writeln!(sink, "algo,n,q,seed,probes,bound,ratio,correct,ms")?;
        for r in reports {
            writeln!(
                sink,
                "{},{},{},{},{},{:.3},{:.6},{},{:.3}",
                r.algo, r.n, r.q, r.seed, r.probes, r.bound, r.ratio, r.correct, r.ms
            )?;
        }
    }
    sink.flush()?;
    Ok(())
}
