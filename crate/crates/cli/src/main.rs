//! `jcqed`: spectra, evolution, entanglement and cavity-loss runs for two
//! uncoupled atom-mode pairs, written as CSV.

mod commands;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::{Loss, Report};
use crate::config::{load_file, CommonArgs, ConfigFile, DissipationArgs, RunConfig};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "jcqed",
    version,
    about = "Two-atom, two-mode Jaynes-Cummings simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dressed-level energies against exact diagonalization, plus E1..E4.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Dressed levels per subsystem (defaults to n_max).
        #[arg(long)]
        levels: Option<usize>,
        /// Exit 1 if any level misses the exact spectrum.
        #[arg(long)]
        check: bool,
    },
    /// Amplitudes of the one-excitation states starting from one shared photon.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Atomic concurrence, entropy and joint ground probability over time.
    Entangle {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Master-equation run with photon loss from both cavities.
    Dissipate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        loss: DissipationArgs,
    },
    /// Runs the analytic-versus-exact check suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<std::path::PathBuf>,
    /// Photon-number cutoff for the spectrum checks.
    #[arg(long)]
    n_max: Option<usize>,
    /// Use the photon count n instead of n + 1 in the level splitting.
    #[arg(long)]
    mutate_q_index: bool,
    #[arg(short, long, value_name = "FILE")]
    output: Option<std::path::PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<Report> {
    let (report, output) = match command {
        Command::Spectrum {
            common,
            levels,
            check,
        } => {
            let file = load_file(&common)?;
            let cfg = RunConfig::resolve(&common, &file, 8)?;
            let levels = file.pick(levels, "levels")?;
            let check = file.switch(check, "check")?;
            (commands::spectrum(&cfg, levels, check)?, cfg.output)
        }
        Command::Evolve { common } => {
            let cfg = RunConfig::resolve(&common, &load_file(&common)?, 1)?;
            (commands::evolve(&cfg)?, cfg.output)
        }
        Command::Entangle { common } => {
            let cfg = RunConfig::resolve(&common, &load_file(&common)?, 1)?;
            (commands::entangle(&cfg)?, cfg.output)
        }
        Command::Dissipate { common, loss } => {
            let file = load_file(&common)?;
            let cfg = RunConfig::resolve(&common, &file, 1)?;
            let gamma = file.pick(loss.gamma, "gamma")?.unwrap_or(0.0);
            let loss = Loss {
                gamma_a: file.pick(loss.gamma_a, "gamma-a")?.unwrap_or(gamma),
                gamma_b: file.pick(loss.gamma_b, "gamma-b")?.unwrap_or(gamma),
                dt: file.pick(loss.dt, "dt")?.unwrap_or(1e-3),
            };
            (commands::dissipate(&cfg, loss)?, cfg.output)
        }
        Command::Verify(args) => {
            let file = match &args.config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::default(),
            };
            let n_max = file.pick(args.n_max, "n-max")?.unwrap_or(8);
            let mutate = file.switch(args.mutate_q_index, "mutate-q-index")?;
            let output = file.pick(args.output, "output")?;
            (commands::verify(n_max, mutate)?, output)
        }
    };
    write_output(output.as_deref(), &report.text)?;
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("jcqed: one or more checks failed");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(err) => {
            eprintln!("jcqed: {err:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
