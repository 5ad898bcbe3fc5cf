//! `falqon` command-line front end.
//!
//! Exit codes: 0 on success, 1 for domain and I/O errors, 2 for usage errors
//! (bad flags, invalid generator parameters, malformed config files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use falqon_core::experiment::{
    run_sweep, summarize_findings, CellStatus, RunManifest, SweepGrid, SweepOptions,
};
use falqon_core::falqon::{parse_schedule_csv, DEFAULT_DT, DEFAULT_LAYERS};
use falqon_core::graph::FamilyKind;
use falqon_core::transfer::{EnsembleSpec, DEFAULT_RECIPIENTS, RECIPIENT_SIZE};
use falqon_core::{
    gen_erdos_renyi, gen_three_regular, max_cut_brute_force, replay_schedule, run_falqon,
    run_transfer, Config, Error, Graph, Trace, TransferSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "falqon",
    version,
    about = "Exact FALQON simulation for Max-Cut and schedule transfer experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a random graph and write it in edge-list format.
    GenGraph(GenGraphArgs),
    /// Solve Max-Cut exactly by enumeration.
    Maxcut(MaxcutArgs),
    /// Run closed-loop FALQON and write the per-layer trace CSV.
    Falqon(FalqonArgs),
    /// Replay a fixed gain schedule (the beta column of a trace CSV) on a graph.
    Replay(ReplayArgs),
    /// Learn a schedule on a donor graph and replay it on sampled recipients.
    Transfer(TransferArgs),
    /// Run a grid of transfer experiments described by a TOML config.
    Sweep(SweepArgs),
    /// Summarize a finished sweep into findings tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenGraphArgs {
    /// Graph family: `er` (Erdős–Rényi) or `3reg` (3-regular).
    #[arg(long)]
    family: FamilyKind,
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Edge probability; required for `er`, rejected for `3reg`.
    #[arg(long)]
    p: Option<f64>,
    /// RNG seed.
    #[arg(long)]
    seed: u64,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MaxcutArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Debug, Args)]
struct StepArgs {
    /// Time step of each layer.
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
}

#[derive(Debug, Args)]
struct FalqonArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    step: StepArgs,
    /// Number of layers.
    #[arg(long, default_value_t = DEFAULT_LAYERS)]
    layers: usize,
    /// Gain used in the first layer.
    #[arg(long, default_value_t = 0.0)]
    beta_init: f64,
    /// Trace CSV output [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Edge-list graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Trace CSV whose `beta` column is replayed, one layer per row.
    #[arg(long)]
    schedule: PathBuf,
    #[command(flatten)]
    step: StepArgs,
    /// Trace CSV output [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TransferArgs {
    /// TOML transfer spec; replaces all donor, recipient and schedule flags.
    #[arg(long, conflicts_with_all = ["donor_family", "donor_n", "donor_p", "donor_seed", "recipient_family", "recipient_n", "recipient_p", "recipients", "recipient_seed_base", "dt", "layers", "beta_init"])]
    spec: Option<PathBuf>,
    /// Donor family: `er` or `3reg`.
    #[arg(long, required_unless_present = "spec")]
    donor_family: Option<FamilyKind>,
    /// Donor vertex count.
    #[arg(long, required_unless_present = "spec")]
    donor_n: Option<usize>,
    /// Donor edge probability (Erdős–Rényi only).
    #[arg(long)]
    donor_p: Option<f64>,
    /// Donor RNG seed.
    #[arg(long, required_unless_present = "spec")]
    donor_seed: Option<u64>,
    /// Recipient family: `er` or `3reg`.
    #[arg(long, default_value = "er")]
    recipient_family: FamilyKind,
    /// Recipient vertex count.
    #[arg(long, default_value_t = RECIPIENT_SIZE)]
    recipient_n: usize,
    /// Recipient edge probability (Erdős–Rényi only).
    #[arg(long)]
    recipient_p: Option<f64>,
    /// Number of recipient graphs.
    #[arg(long, default_value_t = DEFAULT_RECIPIENTS)]
    recipients: usize,
    /// Recipient k is sampled with seed `recipient_seed_base + k`.
    #[arg(long, required_unless_present = "spec")]
    recipient_seed_base: Option<u64>,
    /// Time step of each layer.
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Number of layers.
    #[arg(long, default_value_t = DEFAULT_LAYERS)]
    layers: usize,
    /// Gain used in the donor's first layer.
    #[arg(long, default_value_t = 0.0)]
    beta_init: f64,
    /// Output directory for result.json and the trace CSVs.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML sweep config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Concurrent cells; 0 uses one per CPU.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Recompute cells that already have results.
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Sweep output directory (containing manifest.json).
    #[arg(long)]
    out: PathBuf,
}

/// Failure with its exit-code category.
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidVertexCount { .. }
            | Error::InvalidProbability(_)
            | Error::InvalidConfig(_)
            | Error::TooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text)
        .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    Graph::from_edge_list(&read_text(path)?)
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn ensemble(family: FamilyKind, n: usize, p: Option<f64>) -> EnsembleSpec {
    EnsembleSpec { family, n, p }
}

fn gen_graph(args: GenGraphArgs) -> CliResult {
    let g = match (args.family, args.p) {
        (FamilyKind::ErdosRenyi, Some(p)) => gen_erdos_renyi(args.n, p, args.seed)?,
        (FamilyKind::ErdosRenyi, None) => {
            return Err(Failure::Usage("--p is required for --family er".into()))
        }
        (FamilyKind::ThreeRegular, None) => gen_three_regular(args.n, args.seed)?,
        (FamilyKind::ThreeRegular, Some(_)) => {
            return Err(Failure::Usage("--p does not apply to --family 3reg".into()))
        }
    };
    emit(args.out.as_deref(), &g.to_edge_list())
}

fn maxcut(args: MaxcutArgs) -> CliResult {
    let sol = max_cut_brute_force(&read_graph(&args.graph)?)?;
    println!("optimum={} witness={}", sol.optimum, sol.witness);
    Ok(())
}

fn finish_trace(trace: &Trace, out: Option<&Path>) -> CliResult {
    emit(out, &trace.to_csv())?;
    if out.is_some() {
        println!(
            "layers={} optimum={} final_ratio={}",
            trace.len(),
            trace.optimum,
            trace.final_ratio()
        );
    }
    Ok(())
}

fn falqon(args: FalqonArgs) -> CliResult {
    let g = read_graph(&args.graph)?;
    let cfg = Config::default()
        .with_dt(args.step.dt)
        .with_layers(args.layers)
        .with_beta_init(args.beta_init);
    finish_trace(&run_falqon(&g, &cfg)?, args.out.as_deref())
}

fn replay(args: ReplayArgs) -> CliResult {
    let g = read_graph(&args.graph)?;
    let betas: Vec<f64> = parse_schedule_csv(&read_text(&args.schedule)?)
        .map_err(|e| Failure::Domain(format!("{}: {e}", args.schedule.display())))?;
    let cfg = Config::default()
        .with_dt(args.step.dt)
        .with_layers(betas.len());
    finish_trace(&replay_schedule(&g, &betas, &cfg)?, args.out.as_deref())
}

fn transfer(args: TransferArgs) -> CliResult {
    let spec = match &args.spec {
        Some(path) => TransferSpec::from_toml_str(&read_text(path)?).map_err(|e| match e {
            Error::Parse(msg) => Failure::Usage(format!("{}: {msg}", path.display())),
            other => other.into(),
        })?,
        None => {
            let (Some(family), Some(n), Some(seed), Some(base)) = (
                args.donor_family,
                args.donor_n,
                args.donor_seed,
                args.recipient_seed_base,
            ) else {
                unreachable!("clap enforces the donor flags when --spec is absent")
            };
            TransferSpec::new(
                ensemble(family, n, args.donor_p),
                seed,
                ensemble(args.recipient_family, args.recipient_n, args.recipient_p),
                base,
            )
            .with_recipients(args.recipients)
            .with_config(
                Config::default()
                    .with_dt(args.dt)
                    .with_layers(args.layers)
                    .with_beta_init(args.beta_init),
            )
        }
    };
    spec.validate()?;
    let result = run_transfer(&spec)?;
    result.write_to_dir(&args.out)?;
    println!(
        "donor_final_ratio={} final_mean={} final_std={}",
        result.donor_trace.final_ratio(),
        result.final_mean,
        result.final_std
    );
    Ok(())
}

fn sweep(args: SweepArgs) -> CliResult {
    let text = read_text(&args.config)?;
    let grid = SweepGrid::from_toml_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    let manifest = run_sweep(
        &grid,
        &args.out,
        SweepOptions {
            workers: args.workers,
            force: args.force,
        },
    )?;
    let failed = manifest.count(CellStatus::Failed);
    println!(
        "cells={} completed={} cached={} failed={}",
        manifest.cells.len(),
        manifest.count(CellStatus::Completed),
        manifest.count(CellStatus::Cached),
        failed
    );
    for cell in manifest
        .cells
        .iter()
        .filter(|c| c.status == CellStatus::Failed)
    {
        eprintln!(
            "failed: {}: {}",
            cell.id,
            cell.error.as_deref().unwrap_or("unknown error")
        );
    }
    if failed > 0 {
        return Err(Failure::Domain(format!("{failed} cells failed")));
    }
    Ok(())
}

fn report(args: ReportArgs) -> CliResult {
    let manifest = RunManifest::read(&args.out)?;
    let findings = summarize_findings(&args.out, &manifest)?;
    findings.write(&args.out)?;
    print!("{}", findings.to_text());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::Maxcut(a) => maxcut(a),
        Command::Falqon(a) => falqon(a),
        Command::Replay(a) => replay(a),
        Command::Transfer(a) => transfer(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
