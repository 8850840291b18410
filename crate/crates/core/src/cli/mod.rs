//! Batch runner: `run <config>`, `validate <config>`, `presets list|show`.
//!
//! Exit codes: 0 when every check passes, 2 on an invariant violation, 1 on
//! a configuration or parameter error.

pub mod config;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Result;
use config::{ExperimentConfig, PRESETS};
use experiments::RunOutput;

/// Overrides the worker thread count.
pub const THREADS_ENV: &str = "TWISTED_FOURIER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "twisted-fourier", version, about = "Fourier analysis experiments on twisted crossed products")]
struct Cli {
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment named in a TOML configuration.
    Run { config: PathBuf },
    /// Validate the configured system only.
    Validate { config: PathBuf },
    /// List or describe the shipped systems.
    Presets {
        #[command(subcommand)]
        action: PresetCommand,
    },
}

#[derive(Debug, Subcommand)]
enum PresetCommand {
    List,
    Show { name: String },
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = experiments::run(&cfg, cli.seed)?;
            emit(&cfg, &config, out)
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = experiments::validate_only(&cfg, cli.seed)?;
            emit(&cfg, &config, out)
        }
        Command::Presets { action: PresetCommand::List } => {
            for (name, about) in PRESETS {
                println!("{name:<20} {about}");
            }
            Ok(0)
        }
        Command::Presets { action: PresetCommand::Show { name } } => match PRESETS.iter().find(|(n, _)| *n == name) {
            Some((n, about)) => {
                println!("# {about}\n[system]\npreset = \"{n}\"");
                Ok(0)
            }
            None => Err(crate::Error::Config(format!("unknown preset `{name}`"))),
        },
    }
}

/// Output paths are relative to the configuration file.
fn emit(cfg: &ExperimentConfig, config_path: &Path, out: RunOutput) -> Result<i32> {
    let base = config_path.parent().unwrap_or(Path::new("."));
    match &cfg.output.json {
        Some(p) => std::fs::write(base.join(p), &out.json)?,
        None => print!("{}", out.json),
    }
    if let (Some(p), Some(csv)) = (&cfg.output.csv, &out.csv) {
        std::fs::write(base.join(p), csv)?;
    }
    Ok(out.exit_code)
}
