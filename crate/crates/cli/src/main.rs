mod commands;
mod output;
mod scenario;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use output::Format;
use scenario::{invalid, Invalid};

#[derive(Parser)]
#[command(name = "mzlab", version, about = "Figure data for Mach-Zehnder decoherence under shift noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true, conflicts_with = "preset")]
    scenario: Option<PathBuf>,

    /// Shipped scenario: fig2 ... fig7, entropy, montecarlo.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output file; standard output when absent and the scenario names none.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for the montecarlo subcommand, overriding the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format (default: json for montecarlo, csv otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Channel rates N_O, N_E over a range of mean shifts.
    Fringes,
    /// Operational or purity decoherence over a (delta, sigma) lattice.
    DecoherenceSurface,
    /// Monochromatic decoherence against k*sigma for Gaussian and arcsine noise.
    VisibilityCurve,
    /// Noise-averaged Wigner function grids of the ordinary channel.
    WignerMap,
    /// Classical two-beam visibility and screen intensity per spectral shape.
    Classical,
    /// Differential entropy of scaled shift laws.
    Entropy,
    /// Monte-Carlo check of channel rates against the analytic values.
    Montecarlo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fringes => "fringes",
            Command::DecoherenceSurface => "decoherence-surface",
            Command::VisibilityCurve => "visibility-curve",
            Command::WignerMap => "wigner-map",
            Command::Classical => "classical",
            Command::Entropy => "entropy",
            Command::Montecarlo => "montecarlo",
        }
    }
}

fn load<T: DeserializeOwned>(cli: &Cli) -> anyhow::Result<T> {
    let command = cli.command.name();
    match (&cli.scenario, &cli.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))
        }
        (None, Some(name)) => {
            let text = scenario::preset(name, command)?;
            serde_json::from_str(text).with_context(|| format!("parsing preset {name}"))
        }
        _ => Err(invalid(format!("{command} needs --scenario <path> or --preset <name>"))),
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let format = cli.format.unwrap_or(match cli.command {
        Command::Montecarlo => Format::Json,
        _ => Format::Csv,
    });
    let (bytes, scenario_out) = match cli.command {
        Command::Fringes => {
            let s: scenario::Fringes = load(cli)?;
            (commands::fringes(&s, format)?, s.output)
        }
        Command::DecoherenceSurface => {
            let s: scenario::DecoherenceSurface = load(cli)?;
            (commands::decoherence_surface(&s, format)?, s.output)
        }
        Command::VisibilityCurve => {
            let s: scenario::VisibilityCurve = load(cli)?;
            (commands::visibility_curve(&s, format)?, s.output)
        }
        Command::WignerMap => {
            let s: scenario::WignerMap = load(cli)?;
            (commands::wigner_map(&s, format)?, s.output)
        }
        Command::Classical => {
            let s: scenario::Classical = load(cli)?;
            (commands::classical(&s, format)?, s.output)
        }
        Command::Entropy => {
            let s: scenario::Entropy = load(cli)?;
            (commands::entropy(&s, format)?, s.output)
        }
        Command::Montecarlo => {
            let s: scenario::MonteCarlo = load(cli)?;
            (commands::montecarlo(&s, cli.seed, format)?, s.output)
        }
    };
    match cli.out.as_deref().or(scenario_out.as_deref()) {
        Some(path) => write_file(path, &bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// 2 for invalid input, 3 for numerical failures, 4 for I/O errors.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<mzlab::Error>() {
            return match e {
                mzlab::Error::QuadratureNonConvergence { .. }
                | mzlab::Error::GridCoverage { .. }
                | mzlab::Error::UndefinedState(_) => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<Invalid>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { 4 } else { 2 };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return 4;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
