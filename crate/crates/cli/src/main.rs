use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use modspace::harness::{load_config, write_report, Experiment, ExperimentConfig, GridConfig, Length};

#[derive(Parser)]
#[command(version, about = "Dispersive flows, conserved determinants and modulation-space norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drift of alpha and beta along the flow.
    Conserve(Common),
    /// Weighted modulation norm against the boosted beta2 sum.
    Normequiv(Common),
    /// A priori bound over the amplitude sweep.
    Apriori(Common),
    /// Boost-then-evolve against evolve-then-boost.
    Galilei(Common),
    /// Scaling and embedding constants over the random suite.
    Scaling(Common),
    /// Sextic and quartic boosted tails against powers of the norm.
    Tails(Common),
    /// Weight construction on the orbit family.
    Weights(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the CSV and JSON outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Grid override as `N,L`, e.g. `1024,32pi`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
}

fn parse_grid(s: &str) -> std::result::Result<GridConfig, String> {
    let (n, l) = s.split_once(',').ok_or_else(|| format!("expected N,L, got {s:?}"))?;
    let n = n.trim().parse::<usize>().map_err(|e| format!("grid size {n:?}: {e}"))?;
    Ok(GridConfig { n, l: Length::parse(l)? })
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Conserve(c) => (Experiment::Conserve, c),
            Command::Normequiv(c) => (Experiment::NormEquiv, c),
            Command::Apriori(c) => (Experiment::Apriori, c),
            Command::Galilei(c) => (Experiment::Galilei, c),
            Command::Scaling(c) => (Experiment::Scaling, c),
            Command::Tails(c) => (Experiment::Tails, c),
            Command::Weights(c) => (Experiment::Weights, c),
        }
    }
}

fn configure(args: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dt) = args.dt {
        cfg.flow.dt = dt;
    }
    if let Some(grid) = args.grid {
        cfg.grid = grid;
    }
    cfg.validate().context("invalid configuration after overrides")?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (experiment, args) = cli.command.split();
    let cfg = configure(&args)?;
    let report = experiment.run(&cfg).with_context(|| format!("{experiment:?} failed"))?;
    let dir = args.out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("reports"));
    let (csv, json) = write_report(&report, &dir)?;
    for c in &report.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        println!("{verdict}  {:<32} {:.6e}  (threshold {:.3e})", c.criterion, c.measured, c.threshold);
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
