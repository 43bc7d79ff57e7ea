use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cohfeed::noise::NoiseKind;
use cohfeed::registry::{parse_angle, parse_assignment};
use cohfeed_cli::{run, Command, ExperimentConfig, EXIT_INPUT_ERROR};

/// Coherent feedback control experiments.
#[derive(Parser)]
#[command(name = "cohfeed", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check a channel against a target and print the report (exit 1 if not converging).
    Verify(Flags),
    /// Iterate a channel and write one fidelity/Bloch/concurrence CSV per initial state.
    Converge(Flags),
    /// Mean fidelity under random rotation noise over a λ × σ grid.
    NoiseSweep(Flags),
    /// Asymptotic fidelity of the pairwise-swap approximation over a λ grid.
    Pairwise(Flags),
    /// Bell-target dynamics from the four product initial states.
    Bell(Flags),
}

#[derive(Args)]
struct Flags {
    /// Registry name (optionally `name:key=value,...`) or channel JSON file.
    #[arg(long)]
    channel: Option<String>,
    /// Extra registry parameter `key=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Target state name or JSON file.
    #[arg(long)]
    target: Option<String>,
    /// Initial state name or JSON file; repeatable.
    #[arg(long)]
    initial: Vec<String>,
    /// Step count (step cap for `pairwise`).
    #[arg(long)]
    steps: Option<usize>,
    /// Coupling values; accepts `pi/5` style. Comma-separated or repeated.
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    lambda: Vec<f64>,
    /// Noise strengths. Comma-separated or repeated.
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    sigma: Vec<f64>,
    /// Noise kind: dephasing or depolarising.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<NoiseKind>,
    /// Trajectories averaged per sweep cell.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Master seed for the noise streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $COHFEED_OUT_DIR, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    parse_assignment(s).map_err(|e| e.to_string())
}

fn parse_number(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: cohfeed::Error| e.to_string())
}

impl Flags {
    fn into_config(self) -> Result<ExperimentConfig, cohfeed_cli::CliError> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            channel: self.channel,
            params: self.params.into_iter().collect(),
            target: self.target,
            initial: self.initial,
            steps: self.steps,
            lambda: self.lambda,
            sigma: self.sigma,
            kind: self.kind,
            trajectories: self.trajectories,
            seed: self.seed,
            out: self.out,
        };
        Ok(base.merge(flags))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Converge(f) => (Command::Converge, f),
        Sub::NoiseSweep(f) => (Command::NoiseSweep, f),
        Sub::Pairwise(f) => (Command::Pairwise, f),
        Sub::Bell(f) => (Command::Bell, f),
    };
    let result = flags
        .into_config()
        .and_then(|cfg| run(command, &cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
