//! Command-line front end: run experiments from config files, inspect
//! graph files, and drive the verification suites.
//!
//! Exit codes: 0 on success (and on a passing verification run), 1 when a
//! verification suite finds violations, 2 on operational errors (bad
//! arguments, unreadable files, invalid configuration).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_bandits::graph::{
    greedy_dominating_set, independence_estimate, mas_size, parse_graph_file, MasMode,
    MAS_EXACT_CAP,
};
use graph_bandits::harness::{csv_string, run_many, ExperimentConfig};
use graph_bandits::verify::{
    check_elp_inequalities, check_er_expectation, check_exposure_vs_mas, check_greedy_cover,
    check_indegree_sum, check_weighted_bound, CheckReport,
};

#[derive(Parser)]
#[command(
    name = "graph-bandits",
    version,
    about = "Simulator for online learning with graph-structured feedback",
    long_about = "Runs regret experiments for policies that learn from \
                  side observations along a feedback graph, prints graph \
                  statistics, and verifies the combinatorial bounds the \
                  policies rely on.\n\nExit codes: 0 success or passing \
                  verification, 1 failing verification, 2 operational error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config and emit the aggregated CSV
    /// trace to the configured output file or stdout.
    Simulate(SimulateArgs),
    /// Print structural statistics of a graph file.
    GraphStats(GraphStatsArgs),
    /// Run a verification suite; exits nonzero when any check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for repetitions; defaults to one per core. Results
    /// are identical for every thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct GraphStatsArgs {
    /// Graph file to analyze.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_enum)]
    suite: Suite,
    /// Trials (for `er`: Monte-Carlo graph draws per density, minimum 10000).
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Largest instance size (for `er`: the exact number of arms).
    #[arg(long, default_value_t = 10)]
    max_k: usize,
    /// Suite seed; trial substreams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Exposure of a random distribution never exceeds the largest
    /// acyclic subgraph.
    Exposure,
    /// Indegree sum bound against the exact independence number.
    Indegree,
    /// Greedy dominating set versus the exact optimum and its size bound.
    Cover,
    /// Weighted exposure bound with a mass floor on the dominating set.
    Weighted,
    /// Moment inequalities of the high-probability policy's distributions.
    Elp,
    /// Closed form for the expected observation ratio under random graphs,
    /// at densities 0.25, 0.5, and 1.0.
    Er,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::GraphStats(args) => graph_stats(args),
        Command::Verify(args) => verify(args),
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config: ExperimentConfig = toml::from_str(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))?;
    let result = run_many(&config, args.threads)?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
    let csv = csv_string(&result.aggregate);
    match &config.output {
        Some(path) => {
            fs::write(path, &csv)
                .with_context(|| format!("writing trace to {}", path.display()))?;
            eprintln!(
                "wrote {} trace points to {}",
                result.aggregate.points.len(),
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn graph_stats(args: GraphStatsArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading graph {}", args.input.display()))?;
    let g = parse_graph_file(&text)?;
    let k = g.k();
    println!("nodes: {k}");
    println!("arcs: {}", g.arc_count());
    println!("symmetric: {}", if g.is_symmetric() { "yes" } else { "no" });
    let (alpha, alpha_exact) = independence_estimate(&g);
    println!(
        "independence number: {alpha} ({})",
        if alpha_exact { "exact" } else { "upper bound" }
    );
    if k <= MAS_EXACT_CAP {
        println!(
            "largest acyclic subgraph: {} (exact)",
            mas_size(&g, MasMode::Exact)?
        );
    } else {
        println!(
            "largest acyclic subgraph: {} (lower bound)",
            mas_size(&g, MasMode::Peel)?
        );
    }
    println!(
        "greedy dominating set size: {}",
        greedy_dominating_set(&g).len()
    );
    Ok(ExitCode::SUCCESS)
}

fn report_line(label: &str, report: &CheckReport) -> String {
    format!(
        "suite {label}: {} trials, {} failures, max slack {:.9} -> {}",
        report.trials,
        report.failures.len(),
        report.max_slack,
        if report.passed() { "PASS" } else { "FAIL" }
    )
}

fn print_failures(report: &CheckReport) {
    const SHOWN: usize = 5;
    for failure in report.failures.iter().take(SHOWN) {
        eprintln!("failure: {} (slack {})", failure.detail, failure.slack);
        for line in failure.instance.lines() {
            eprintln!("  {line}");
        }
    }
    if report.failures.len() > SHOWN {
        eprintln!("... and {} more failures", report.failures.len() - SHOWN);
    }
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let VerifyArgs {
        suite,
        trials,
        max_k,
        seed,
        threads,
    } = args;
    let reports: Vec<(String, CheckReport)> = match suite {
        Suite::Exposure => vec![(
            "exposure".into(),
            check_exposure_vs_mas(trials, max_k, seed, threads)?,
        )],
        Suite::Indegree => vec![(
            "indegree".into(),
            check_indegree_sum(trials, max_k, seed, threads)?,
        )],
        Suite::Cover => vec![(
            "cover".into(),
            check_greedy_cover(trials, max_k, seed, threads)?,
        )],
        Suite::Weighted => vec![(
            "weighted".into(),
            check_weighted_bound(trials, max_k, seed, threads)?,
        )],
        Suite::Elp => vec![(
            "elp".into(),
            check_elp_inequalities(trials, max_k, seed, threads)?,
        )],
        Suite::Er => {
            // One fixed mass vector (it depends only on the seed) probed
            // at three densities.
            let mut reports = Vec::new();
            for density in [0.25, 0.5, 1.0] {
                let report = check_er_expectation(max_k, density, trials, seed, threads)?;
                reports.push((format!("er[density={density}]"), report));
            }
            reports
        }
    };
    let mut all_passed = true;
    for (label, report) in &reports {
        println!("{}", report_line(label, report));
        if !report.passed() {
            all_passed = false;
            print_failures(report);
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
