use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dynsparsify::harness::{
    self, BenchConfig, Checks, RunConfig, RunReport, StreamKind, Target, TraceSpec, WeightDist,
};
use dynsparsify::trace::{read_trace, write_trace};
use dynsparsify::{GeneralSparsifier, Mode, UpdateEvent};

#[derive(Parser, Debug)]
#[command(name = "dynsparsify", version, about = "Dynamic rounding of fractional matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated update trace
    Gen(GenArgs),
    /// Replay a trace and emit a JSON report
    Run(RunArgs),
    /// Replay a trace with every check enabled and summarize
    Verify(VerifyArgs),
    /// Measure recourse and work across graph sizes
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct StreamArgs {
    /// Stream kind: random-insert-delete, decremental, sliding-window, weight-churn
    #[arg(long, default_value = "random-insert-delete")]
    kind: StreamKind,
    /// Number of events to generate
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// constant:X, uniform:LO,HI or log-uniform:LO,HI
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightDist>,
    /// Only generate edges between the two halves of the node set
    #[arg(long)]
    bipartite: bool,
    /// Edge count kept by the sliding-window kind
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    stream: StreamArgs,
    /// Constant weight for a single uniform sparsifier
    #[arg(long)]
    uniform: Option<f64>,
    /// Output trace file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Derive eps and beta from delta (with --mode paper)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "experiment")]
    mode: Mode,
    /// Feed a single uniform sparsifier with weight lambda
    #[arg(long)]
    uniform: Option<f64>,
    /// Trace file; a trace is generated from the stream flags if absent
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    stream: StreamArgs,
    /// Static-equivalence check interval in events
    #[arg(long, default_value_t = 100)]
    equivalence_every: usize,
    /// Build the leading insertions statically before replaying the rest
    #[arg(long)]
    static_prefix: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated: invariants, equivalence, certificate, orientation, matching, all, none
    #[arg(long, default_value = "invariants,certificate")]
    checks: Checks,
    /// JSON report file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "all")]
    checks: Checks,
    /// JSON report file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the final sparsifier, certificate and per-level stats as JSON
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated graph sizes
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value = "random-insert-delete")]
    kind: StreamKind,
    #[arg(long, default_value_t = 20)]
    updates_per_node: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fail if recourse or work grows more than this factor from n to 4n
    #[arg(long)]
    max_growth: Option<f64>,
    /// JSON report file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<WeightDist, String> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("expected KIND:VALUES, got {s:?}"))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
        .collect::<Result<_, _>>()?;
    match (kind, nums.as_slice()) {
        ("constant", &[value]) => Ok(WeightDist::Constant { value }),
        ("uniform", &[lo, hi]) if 0.0 < lo && lo <= hi => Ok(WeightDist::Uniform { lo, hi }),
        ("log-uniform", &[lo, hi]) if 0.0 < lo && lo <= hi => Ok(WeightDist::LogUniform { lo, hi }),
        _ => Err(format!("unsupported weight distribution {s:?}")),
    }
}

fn trace_spec(n: usize, stream: &StreamArgs, uniform: Option<f64>) -> TraceSpec {
    let mut spec = TraceSpec::new(n, stream.kind, stream.length, stream.seed);
    if let Some(w) = stream.weights {
        spec.weights = w;
    } else if let Some(lambda) = uniform {
        spec.weights = WeightDist::Constant { value: lambda };
    }
    spec.bipartite = stream.bipartite;
    spec.window = stream.window;
    spec
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load_events(p: &ParamArgs) -> Result<Vec<UpdateEvent>> {
    match &p.trace {
        Some(path) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_trace(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
        }
        None => Ok(harness::generate(&trace_spec(p.n, &p.stream, p.uniform))),
    }
}

fn run_config(p: &ParamArgs, checks: Checks) -> Result<RunConfig> {
    let mut cfg = match (p.mode, p.delta) {
        (Mode::Paper, Some(delta)) => RunConfig::from_delta(p.n, delta)?,
        (Mode::Paper, None) => bail!("--mode paper needs --delta"),
        (Mode::Experiment, delta) => RunConfig { delta, ..RunConfig::experiment(p.n, p.eps, p.beta) },
    };
    if let Some(lambda) = p.uniform {
        cfg = cfg.uniform(lambda);
    }
    cfg.checks = checks;
    cfg.equivalence_every = p.equivalence_every;
    cfg.static_prefix = p.static_prefix;
    Ok(cfg)
}

fn replay(p: &ParamArgs, checks: Checks) -> Result<(Vec<UpdateEvent>, RunConfig, RunReport)> {
    let events = load_events(p)?;
    let cfg = run_config(p, checks)?;
    log::info!("replaying {} events on n = {}", events.len(), cfg.n);
    let report = harness::run(&events, &cfg)?;
    Ok((events, cfg, report))
}

fn print_summary(report: &RunReport) {
    eprintln!(
        "{} updates, mean recourse {:.3}, mean work {:.1}, |S| = {}",
        report.updates, report.mean_recourse, report.mean_work, report.final_output
    );
    for c in &report.checks {
        let status = if c.failures == 0 { "PASS" } else { "FAIL" };
        eprintln!("{status} {:<12} {}/{} failed", c.name, c.failures, c.runs);
        if let Some(msg) = &c.first_failure {
            eprintln!("     first failure: {msg}");
        }
    }
    let r = &report.ratios;
    if let (Some(ratio), Some(bound)) = (r.size_ratio, r.size_bound) {
        eprintln!("size ratio {ratio:.4} (bound {bound:.4})");
    }
    if let Some(ratio) = r.mu_ratio {
        eprintln!("matching ratio {ratio:.4} (bound {})", r.mu_bound.map_or("n/a".into(), |b| format!("{b:.4}")));
    }
}

fn snapshot(events: &[UpdateEvent], cfg: &RunConfig, out: &Path) -> Result<()> {
    if !matches!(cfg.target, Target::General) {
        bail!("--snapshot needs the general sparsifier");
    }
    let mut g = match cfg.mode {
        Mode::Paper => GeneralSparsifier::from_delta(cfg.n, cfg.delta.unwrap_or_default())?,
        Mode::Experiment => GeneralSparsifier::new(cfg.n, cfg.eps, cfg.beta)?,
    };
    for ev in events {
        g.apply_update(ev)?;
    }
    write_json(Some(out), &g.snapshot())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(a) => {
            let events = harness::generate(&trace_spec(a.n, &a.stream, a.uniform));
            let mut w = writer(a.out.as_deref())?;
            write_trace(&mut w, &events)?;
            w.flush()?;
            log::info!("wrote {} events", events.len());
            Ok(true)
        }
        Command::Run(a) => {
            let (_, _, report) = replay(&a.params, a.checks)?;
            write_json(a.out.as_deref(), &report)?;
            if !report.passed {
                print_summary(&report);
            }
            Ok(report.passed)
        }
        Command::Verify(a) => {
            let (events, cfg, report) = replay(&a.params, a.checks)?;
            print_summary(&report);
            if let Some(out) = a.out.as_deref() {
                write_json(Some(out), &report)?;
            }
            if let Some(path) = a.snapshot.as_deref() {
                snapshot(&events, &cfg, path)?;
            }
            Ok(report.passed)
        }
        Command::Bench(a) => {
            let cfg = BenchConfig {
                sizes: a.n,
                eps: a.eps,
                beta: a.beta,
                kind: a.kind,
                updates_per_node: a.updates_per_node,
                seed: a.seed,
            };
            let report = harness::scaling(&cfg)?;
            write_json(a.out.as_deref(), &report)?;
            if let Some(p) = &a.csv {
                std::fs::write(p, report.to_csv()).with_context(|| format!("writing {}", p.display()))?;
            }
            for g in &report.growth {
                eprintln!(
                    "n {} -> {}: recourse x{:.3}, work x{:.3}",
                    g.from_n, g.to_n, g.recourse_ratio, g.work_ratio
                );
            }
            Ok(a.max_growth.is_none_or(|limit| report.worst_growth() <= limit))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DYNSPARSIFY_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
