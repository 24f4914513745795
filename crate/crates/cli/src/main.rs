use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epp_cli::{run_experiment, write_report, CliError, ExperimentConfig, Mode};
use log::{error, info, LevelFilter};

#[derive(Parser)]
#[command(
    name = "epp",
    version,
    about = "Drift coefficient of the white-noise-driven elasto-plastic oscillator"
)]
struct Cli {
    /// Only print errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            LevelFilter::Error
        } else {
            LevelFilter::Info
        })
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = cfg.validate()?;
            info!(
                "{}: {} rows, mode {:?}",
                config.display(),
                rows.len(),
                cfg.run.mode
            );
            Ok(())
        }
        Command::Run {
            config,
            mode,
            out,
            threads,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(m) = mode {
                cfg.run.mode = m;
            }
            if let Some(o) = out {
                cfg.run.out = o;
            }
            if let Some(t) = threads {
                cfg.run.threads = t;
            }
            let report = run_experiment(&cfg)?;
            for path in write_report(&report, &cfg.run.out)? {
                info!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
