use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graph_energy::Error;
use serde::{Deserialize, Serialize};

mod commands;
mod config;

/// Planted-partition graph spectra, graph energy and detectability sweeps.
#[derive(Debug, Parser)]
#[command(name = "graph-energy", version)]
struct Cli {
    /// JSON file supplying any flag of the subcommand (flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Full spectrum, energy and bulk statistics of an edge list or a fresh graph.
    Spectrum(SpectrumArgs),
    /// Monte Carlo sweep over k_ab; writes a summary CSV and plot data.
    Sweep(SweepArgs),
    /// Closed-form predictions for one parameter point.
    Theory(TheoryArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// Node count (even).
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean degree.
    #[arg(long)]
    pub k: Option<f64>,
    /// Expected inter-community degree; ignored for the ER model.
    #[arg(long = "kab", alias = "k-ab")]
    pub k_ab: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// planted | erdos_renyi
    #[arg(long)]
    pub model: Option<String>,
    /// pair_loop | block_binomial
    #[arg(long)]
    pub sampler: Option<String>,
    /// Edge-list path; the manifest goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    /// Edge list to analyse; without it a graph is generated from --n/--k/--kab/--seed.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Node count (overrides the edge-list header).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "kab", alias = "k-ab")]
    pub k_ab: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub sampler: Option<String>,
    /// Histogram bin count.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Output prefix for <prefix>.spectrum.csv, .histogram.csv, .report.json, .manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format on stdout: json | text
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    /// k_ab values: "a,b,c" or an inclusive range "start:stop:step".
    #[arg(long = "kab-grid", alias = "k-ab-grid")]
    pub k_ab_grid: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// energy | lambda2 | both
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub sampler: Option<String>,
    /// planted_at_k | erdos_renyi
    #[arg(long)]
    pub baseline: Option<String>,
    /// Plateau reference for the effective threshold: empirical | theoretical
    #[arg(long)]
    pub plateau: Option<String>,
    /// Worker threads (0: all cores). Defaults to $GRAPH_ENERGY_THREADS, then 0.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output prefix for <prefix>.summary.csv, .plot.dat, .manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rerun the sweep recorded in a manifest.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "kab", alias = "k-ab")]
    pub k_ab: Option<f64>,
    /// Number of communities (energy formulas need 2).
    #[arg(long)]
    pub q: Option<u32>,
    /// json | text
    #[arg(long)]
    pub format: Option<String>,
    /// Also write the JSON (and a manifest) to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::Infeasible(_) | Error::Parse(_) | Error::Json(_) => 2,
        Error::Eigensolver { .. } | Error::Identity { .. } | Error::SweepAborted { .. } => 3,
        Error::Io(_) => 4,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let file = cli.config.as_deref().map(config::load).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Generate(a) => commands::generate(config::merge(&a, file)?),
        Command::Spectrum(a) => commands::spectrum(config::merge(&a, file)?),
        Command::Sweep(a) => commands::sweep(config::merge(&a, file)?),
        Command::Theory(a) => commands::theory(config::merge(&a, file)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
