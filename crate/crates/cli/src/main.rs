use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qthermo_cli::{replay, run_to_dir, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qthermo", version, about = "Open quantum system thermodynamics scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the seed from the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// `key=value` with a dotted key path; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Re-run the configuration stored in a manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            overrides,
        } => {
            let mut cfg = ScenarioConfig::load(&config, &overrides)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let manifest = run_to_dir(&cfg, &out)?;
            log::info!("wrote {:?} to {}", manifest.outputs, out.display());
        }
        Command::Replay { manifest, out } => {
            let m = replay(&manifest, &out)?;
            log::info!("wrote {:?} to {}", m.outputs, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qthermo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
