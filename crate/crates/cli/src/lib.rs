//! `mpsync`: generate trade networks, run the heat-equation dynamics on
//! them, inspect divergence, benchmark the Laplacian and verify results.
//!
//! Exit codes: 0 success, 1 a property, assumption or monotonicity failure,
//! 2 a usage or input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use maxplus_sync::dynamics::{divergence_report, DivergenceReport, Epsilon, Parallelism, RunConfig, Schedule};
use maxplus_sync::experiment::{self, BenchSpec, Summary, TrialsSpec, VerifySpec};
use maxplus_sync::generate::{random_instance, sinking_pair, InstanceParams, Interval};
use maxplus_sync::io;
use maxplus_sync::{Error, Network, State};

#[derive(Debug, Parser)]
#[command(name = "mpsync", version, about = "Max-plus synchronization of trading networks")]
pub struct Cli {
    /// Master seed for instances, initial states and oracles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Reject instances that break the modelling assumptions.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Loss threshold: `auto` (largest edge weight) or a number.
    #[arg(long, global = true, default_value = "auto")]
    pub eps: Epsilon<f64>,

    /// Run exactly T sweeps, ignoring the stopping rules [default: 10].
    #[arg(long, global = true, value_name = "T", conflicts_with = "max_iters")]
    pub steps: Option<usize>,

    /// Stop on convergence, a plateau or after K sweeps.
    #[arg(long, global = true, value_name = "K")]
    pub max_iters: Option<usize>,

    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub workers: Parallelism,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw an instance and write `instance.json`.
    Generate(GenerateArgs),
    /// Run seeded trials and write traces, final states and a summary.
    Run(RunArgs),
    /// Report entries still sinking at the end of a run.
    Diverging(DivergingArgs),
    /// Time one Laplacian application over a range of network sizes.
    Bench(BenchArgs),
    /// Run every oracle against an instance and its solutions.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Two agents with no finite equilibrium; see `--gap`.
    SinkingPair,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "agents", default_value_t = 20)]
    pub n_agents: usize,

    #[arg(long = "alternatives", default_value_t = 10)]
    pub n_alternatives: usize,

    #[arg(long, default_value_t = 0.2)]
    pub edge_prob: f64,

    /// Coupling entries, `lo,hi`.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub cost_range: Interval,

    /// Edge weights, `lo,hi`.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub weight_range: Interval,

    /// Use a hand-built instance instead of a random one.
    #[arg(long)]
    pub preset: Option<Preset>,

    /// Offset of the sinking pair.
    #[arg(long, default_value_t = 5.0)]
    pub gap: f64,
}

impl GenerateArgs {
    fn build(&self, seed: u64) -> anyhow::Result<Network> {
        Ok(match self.preset {
            Some(Preset::SinkingPair) => sinking_pair(self.gap)?,
            None => random_instance(&InstanceParams {
                n_agents: self.n_agents,
                n_alternatives: self.n_alternatives,
                edge_prob: self.edge_prob,
                cost_range: self.cost_range,
                weight_range: self.weight_range,
                seed,
            })?,
        })
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Read the instance from a file instead of generating one.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with_all = ["n_agents", "n_alternatives", "edge_prob", "cost_range", "weight_range", "preset"]
    )]
    pub instance: Option<PathBuf>,

    #[command(flatten)]
    pub generate: GenerateArgs,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    /// Initial states are drawn uniformly from `lo,hi`.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub state_range: Interval,

    /// Consecutive flat α steps that count as a plateau.
    #[arg(long, default_value_t = 5)]
    pub plateau_window: usize,

    /// Final states kept per trial for `diverging`.
    #[arg(long, default_value_t = 3)]
    pub keep_tail: usize,

    /// A final α at most this counts as α → 0.
    #[arg(long, default_value_t = 1e-6)]
    pub alpha_zero_tol: f64,

    /// Tolerance of the fixed-point test on final states.
    #[arg(long, default_value_t = 1e-6)]
    pub solution_tol: f64,
}

#[derive(Debug, Args)]
pub struct DivergingArgs {
    /// Directory written by `run`.
    #[arg(long, value_name = "DIR")]
    pub run: PathBuf,

    /// Entries below this that are still decreasing are flagged.
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub floor: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    pub agent_counts: Vec<usize>,

    #[arg(long = "alternatives", default_value_t = 20)]
    pub n_alternatives: usize,

    #[arg(long, default_value_t = 0.2)]
    pub edge_prob: f64,

    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Instance file; defaults to `instance.json` inside `--run`.
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,

    /// Run directory; its final states marked as solutions are checked.
    #[arg(long, value_name = "DIR")]
    pub run: Option<PathBuf>,

    /// Extra state files to check (repeatable).
    #[arg(long = "solution", value_name = "FILE")]
    pub solutions: Vec<PathBuf>,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    #[arg(long, default_value_t = 100)]
    pub grid_trials: usize,

    #[arg(long, default_value_t = 0.25)]
    pub grid_step: f64,

    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, default_value_t = 1e-6)]
    pub solution_tol: f64,
}

/// A check ran and failed; maps to exit code 1.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, A>(args: I) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::AssumptionViolations(_) | Error::NonMonotoneAlpha { .. }) => 1,
        _ => 2,
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(cli, args),
        Command::Run(args) => cmd_run(cli, args),
        Command::Diverging(args) => cmd_diverging(cli, args),
        Command::Bench(args) => cmd_bench(cli, args),
        Command::Verify(args) => cmd_verify(cli, args),
    }
}

fn run_config(cli: &Cli) -> RunConfig<f64> {
    let schedule = match (cli.steps, cli.max_iters) {
        (_, Some(k)) => Schedule::UntilConverged { max_iters: k },
        (Some(t), None) => Schedule::FixedSteps(t),
        (None, None) => Schedule::FixedSteps(10),
    };
    RunConfig {
        epsilon: cli.eps,
        schedule,
        parallelism: cli.workers,
        ..RunConfig::default()
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn out_dir(cli: &Cli) -> anyhow::Result<&Path> {
    fs::create_dir_all(&cli.out).with_context(|| format!("cannot create {}", cli.out.display()))?;
    Ok(&cli.out)
}

fn load_instance(path: &Path, strict: bool) -> anyhow::Result<Network> {
    let loaded =
        io::load_network::<f64>(&read(path)?, strict).with_context(|| format!("loading {}", path.display()))?;
    for v in &loaded.violations {
        eprintln!("warning: {v}");
    }
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.network)
}

fn describe_epsilon(net: &Network) -> String {
    match net.max_edge_weight() {
        Some(w) => format!("eps = {w}"),
        None => {
            eprintln!("warning: the network has no edges, so the largest edge weight is undefined");
            "eps = undefined (no edges)".to_owned()
        }
    }
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> anyhow::Result<()> {
    let net = args.build(cli.seed)?;
    let path = out_dir(cli)?.join("instance.json");
    write(&path, io::save_network(&net)?)?;
    println!(
        "wrote {} ({} agents, {} alternatives, {} edges)",
        path.display(),
        net.n_agents(),
        net.n_alternatives(),
        net.edges().len()
    );
    println!("{}", describe_epsilon(&net));
    Ok(())
}

fn cmd_run(cli: &Cli, args: &RunArgs) -> anyhow::Result<()> {
    let net = match &args.instance {
        Some(path) => load_instance(path, cli.strict)?,
        None => args.generate.build(cli.seed)?,
    };
    let spec = TrialsSpec {
        n_trials: args.trials,
        seed: cli.seed,
        state_range: args.state_range,
        run: RunConfig {
            plateau_window: args.plateau_window,
            keep_tail: args.keep_tail,
            ..run_config(cli)
        },
        workers: cli.workers,
    };
    let trials = experiment::run_trials(&net, &spec)?;
    let summary = experiment::summarize(&net, &trials, args.alpha_zero_tol, args.solution_tol)?;

    let out = out_dir(cli)?;
    write(&out.join("instance.json"), io::save_network(&net)?)?;
    for t in &trials {
        let k = t.index;
        write(
            &out.join(format!("trace_{k:03}.csv")),
            experiment::trace_csv(&t.outcome.trace)?,
        )?;
        write(
            &out.join(format!("final_{k:03}.json")),
            io::save_state(&t.outcome.state)?,
        )?;
        let tail = t
            .outcome
            .tail
            .iter()
            .map(io::state_to_json)
            .collect::<Result<Vec<_>, _>>()?;
        write(
            &out.join(format!("tail_{k:03}.json")),
            serde_json::to_vec_pretty(&tail)?,
        )?;
    }
    write(&out.join("summary.json"), serde_json::to_vec_pretty(&summary)?)?;

    println!(
        "{} trials, eps = {}: {} with alpha -> 0, {} not ({:.0}%)",
        summary.n_trials,
        summary.epsilon,
        summary.converged,
        summary.not_converged,
        100.0 * summary.converged_fraction
    );
    let counts: Vec<String> = summary.status_counts.iter().map(|(s, n)| format!("{s} {n}")).collect();
    println!("status: {}", counts.join(", "));
    println!("wrote {}", out.display());
    Ok(())
}

/// `tail_*.json` files of a run directory, in trial order.
fn tails(dir: &Path) -> anyhow::Result<Vec<(usize, PathBuf)>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(k) = name.strip_prefix("tail_").and_then(|n| n.strip_suffix(".json")) {
            if let Ok(k) = k.parse() {
                found.push((k, path));
            }
        }
    }
    found.sort();
    Ok(found)
}

fn format_report(r: &DivergenceReport) -> String {
    let entries: Vec<String> = r
        .entries
        .iter()
        .map(|&(u, i)| format!("({}, {})", u + 1, i + 1))
        .collect();
    let agents: Vec<String> = r.agents.iter().map(|u| (u + 1).to_string()).collect();
    format!(
        "{}; agents {{{}}} {}",
        entries.join(", "),
        agents.join(", "),
        if r.connected {
            "form a connected subgraph"
        } else {
            "are not connected"
        }
    )
}

fn cmd_diverging(cli: &Cli, args: &DivergingArgs) -> anyhow::Result<()> {
    let net = load_instance(&args.run.join("instance.json"), cli.strict)?;
    let files = tails(&args.run)?;
    if files.is_empty() {
        bail!(Error::InvalidConfig(format!(
            "no tail_*.json files in {}",
            args.run.display()
        )));
    }
    let mut reports = Vec::new();
    for (k, path) in files {
        let docs: Vec<serde_json::Value> =
            serde_json::from_slice(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
        let window = docs
            .into_iter()
            .map(io::state_from_json)
            .collect::<Result<Vec<State>, _>>()?;
        let report = divergence_report(&net, &window, args.floor)?;
        reports.push(serde_json::json!({
            "trial": k,
            "entries": report.entries,
            "agents": report.agents,
            "connected": report.connected,
        }));
        if !report.is_empty() {
            println!("trial {k}: {}", format_report(&report));
        }
    }
    if reports
        .iter()
        .all(|r| r["entries"].as_array().is_some_and(Vec::is_empty))
    {
        println!("none");
    }
    write(
        &out_dir(cli)?.join("divergence.json"),
        serde_json::to_vec_pretty(&reports)?,
    )?;
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> anyhow::Result<()> {
    let spec = BenchSpec {
        agent_counts: args.agent_counts.clone(),
        n_alternatives: args.n_alternatives,
        edge_prob: args.edge_prob,
        repetitions: args.repetitions,
        seed: cli.seed,
        workers: cli.workers,
    };
    let rows = experiment::bench(&spec)?;
    println!(
        "{:>6} {:>4} {:>8} {:>14} {:>14}",
        "N", "d", "edges", "mean_seconds", "std_seconds"
    );
    for r in &rows {
        println!(
            "{:>6} {:>4} {:>8} {:>14.6} {:>14.6}",
            r.n_agents, r.n_alternatives, r.edges, r.mean_seconds, r.std_seconds
        );
    }
    let path = out_dir(cli)?.join("bench.csv");
    write(&path, experiment::bench_csv(&rows)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> anyhow::Result<()> {
    let instance = match (&args.instance, &args.run) {
        (Some(path), _) => path.clone(),
        (None, Some(dir)) => dir.join("instance.json"),
        (None, None) => bail!(Error::InvalidConfig("verify needs --instance or --run".into())),
    };
    let net = load_instance(&instance, cli.strict)?;

    let mut solutions = Vec::new();
    if let Some(dir) = &args.run {
        let summary: Summary = serde_json::from_slice(&read(&dir.join("summary.json"))?)
            .with_context(|| format!("parsing {}", dir.join("summary.json").display()))?;
        for t in summary.trials.iter().filter(|t| t.is_solution) {
            let path = dir.join(format!("final_{:03}.json", t.trial));
            solutions.push(io::load_state(&read(&path)?).with_context(|| format!("loading {}", path.display()))?);
        }
    }
    for path in &args.solutions {
        solutions.push(io::load_state(&read(path)?).with_context(|| format!("loading {}", path.display()))?);
    }

    let spec = VerifySpec {
        trials: args.trials,
        grid_trials: args.grid_trials,
        grid_step: args.grid_step,
        seed: cli.seed,
        tol: args.tol,
        solution_tol: args.solution_tol,
    };
    let report = experiment::verify(&net, &solutions, &spec)?;
    println!("{} solution(s) checked", solutions.len());
    for r in &report.reports {
        println!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, r.summary());
        for f in r.failures.iter().take(5) {
            println!("    trial {} [{}]: {}", f.trial, f.check, f.detail);
        }
    }
    write(&out_dir(cli)?.join("verify.json"), serde_json::to_vec_pretty(&report)?)?;
    if !report.passed {
        let failed: Vec<&str> = report
            .reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.property.as_str())
            .collect();
        return Err(CheckFailed(format!("failed: {}", failed.join(", "))).into());
    }
    Ok(())
}
