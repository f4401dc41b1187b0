use clap::{Args, Parser, Subcommand};
use quadrosc::config::{self, Mode};
use quadrosc::report::error_block;
use quadrosc::run::run;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulator and analysis toolkit for a three-oscillator quadrature
/// actuation system and the crawling robot it drives.
#[derive(Parser)]
#[command(name = "quadrosc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured sample rate (Hz).
    #[arg(long)]
    sample_rate: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation (config mode: oscillator, quadrature or crawler).
    Simulate(CommonArgs),
    /// Analyze trace CSV files (config mode: analyze).
    Analyze(CommonArgs),
    /// Fit thermal parameters to period observations (config mode: calibrate).
    Calibrate(CommonArgs),
    /// Evaluate an objective over a parameter grid (config mode: sweep).
    Sweep(CommonArgs),
    /// Full quadrature-to-crawler pipeline (config mode: pipeline).
    Pipeline(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::Analyze(a)
            | Command::Calibrate(a)
            | Command::Sweep(a)
            | Command::Pipeline(a) => a,
        }
    }

    fn accepts(&self, mode: Mode) -> bool {
        match self {
            Command::Simulate(_) => {
                matches!(mode, Mode::Oscillator | Mode::Quadrature | Mode::Crawler)
            }
            Command::Analyze(_) => mode == Mode::Analyze,
            Command::Calibrate(_) => mode == Mode::Calibrate,
            Command::Sweep(_) => mode == Mode::Sweep,
            Command::Pipeline(_) => mode == Mode::Pipeline,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Analyze(_) => "analyze",
            Command::Calibrate(_) => "calibrate",
            Command::Sweep(_) => "sweep",
            Command::Pipeline(_) => "pipeline",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command;
    let args = command.args();

    let mut config = match config::load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{}", error_block(command.name(), "config", &e.to_string()));
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
        config.rng_seed_explicit = true;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.display().to_string();
    }
    if let Some(rate) = args.sample_rate {
        config.sample_rate_hz = rate;
    }
    if !command.accepts(config.mode) {
        eprint!(
            "{}",
            error_block(
                command.name(),
                "config",
                &format!(
                    "config mode '{}' does not match subcommand '{}'",
                    config.mode.as_str(),
                    command.name()
                ),
            )
        );
        return ExitCode::from(2);
    }

    match run(&config) {
        Ok(report) => {
            print!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!(
                "{}",
                error_block(config.mode.as_str(), e.kind(), &e.to_string())
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
