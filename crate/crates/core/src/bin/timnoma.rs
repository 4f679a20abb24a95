use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use timnoma::harness::config::{read_raw_config, Experiment, RawConfig, SnrGridSpec};
use timnoma::harness::{emit_csv, run_with_threads, threads_from_env};

/// Hybrid TIM-NOMA downlink simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-user and total BER of the hybrid scheme.
    Ber(Common),
    /// Fading-averaged hybrid, single-user and TDMA rates.
    Rate(Common),
    /// Hybrid over TDMA sum-rate ratio.
    Ratio(Common),
    /// Each user alone in the cell.
    SingleUser {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SingleMetric::Ber)]
        metric: SingleMetric,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SingleMetric {
    Ber,
    Rate,
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; defaults reproduce the reference cell.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// SNR grid, e.g. "0:5:60" or "0,10,20" (dB).
    #[arg(long)]
    snr: Option<String>,
    /// Frames per SNR point (BER) or fading realizations (rates).
    #[arg(long)]
    frames: Option<u64>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Io(String),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, experiment) = match cli.command {
        Command::Ber(c) => (c, Experiment::Ber),
        Command::Rate(c) => (c, Experiment::Rate),
        Command::Ratio(c) => (c, Experiment::Ratio),
        Command::SingleUser { common, metric } => (
            common,
            match metric {
                SingleMetric::Ber => Experiment::BerSingleUser,
                SingleMetric::Rate => Experiment::RateSingleUser,
            },
        ),
    };

    let mut raw = match &common.config {
        Some(path) => read_raw_config(path).map_err(|e| Failure::Config(e.to_string()))?,
        None => RawConfig::default(),
    };
    raw.experiment = experiment;
    if let Some(seed) = common.seed {
        raw.seed = seed;
    }
    if let Some(snr) = common.snr {
        raw.simulation.snr_grid = SnrGridSpec::Text(snr);
    }
    if let Some(frames) = common.frames {
        match experiment {
            Experiment::Ber | Experiment::BerSingleUser => raw.simulation.frames = frames,
            _ => raw.simulation.rate_realizations = frames,
        }
    }
    let config = raw.validate().map_err(|e| Failure::Config(e.to_string()))?;

    let result = run_with_threads(&config, threads_from_env())
        .map_err(|e| Failure::Config(e.to_string()))?;

    let io_err = |e: io::Error| Failure::Io(e.to_string());
    match &common.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            emit_csv(&result, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        None => {
            let stdout = io::stdout();
            emit_csv(&result, stdout.lock()).map_err(io_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
