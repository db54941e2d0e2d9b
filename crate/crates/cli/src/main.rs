use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polariton::scenario::{compare_runs, parse_config, run_scenario, serialize_config, ModelKind, Norm, RunConfig};
use polariton::{Error, Result};

#[derive(Parser)]
#[command(name = "polariton", version, about = "Stored, retrieved and stationary light pulses in EIT media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its snapshots and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the model selected in the configuration.
        #[arg(long)]
        model: Option<ModelKind>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two run directories snapshot by snapshot.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "l2")]
        norm: Norm,
    },
    /// Print the default configuration.
    Defaults,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, model, out } => {
            let text = std::fs::read_to_string(&config).map_err(|source| Error::Io {
                path: config.clone(),
                source,
            })?;
            let mut cfg = parse_config(&text)?;
            if let Some(model) = model {
                cfg.model = model;
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let manifest = run_scenario(&cfg)?;
            for w in &manifest.warnings {
                log::warn!("{w}");
            }
            println!(
                "{} run: {} snapshots written to {} (beta = {:.6}, {:.2} s)",
                cfg.model.name(),
                manifest.snapshots.len(),
                cfg.output_dir.display(),
                manifest.beta,
                manifest.wall_time
            );
        }
        Command::Compare { a, b, norm } => {
            println!("{}", compare_runs(&a, &b, norm)?);
        }
        Command::Defaults => println!("{}", serialize_config(&RunConfig::default())),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
