use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use openmap::scenario::{self, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "openmap", version, about = "Reduced-dynamics map scenarios for the impurity qubit model")]
struct Cli {
    /// Override the time grid as START:END:STEPS.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Seed of the random-state positivity probe.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (a JSON config path, or a preset name).
    Run {
        config: PathBuf,
        /// Output directory (default: $OPENMAP_OUT, then ./openmap-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of one field.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        vary: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every named preset with its parameters.
    ListPresets,
}

fn load(cli: &Cli, path: &std::path::Path) -> Result<ScenarioConfig, CliError> {
    let mut cfg = scenario::load_config(path)?;
    if let Some(g) = &cli.grid {
        cfg.grid = scenario::parse_grid(g)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config, out } => {
            let cfg = load(cli, config)?;
            let dir = scenario::output_dir(out.clone());
            let manifest = scenario::execute(&cfg, &dir)?;
            println!("{}: wrote {} file(s) to {}", manifest.scenario, manifest.files.len(), dir.display());
        }
        Command::Sweep { config, vary, values, out } => {
            let cfg = load(cli, config)?;
            let dir = scenario::output_dir(out.clone());
            let manifest = scenario::sweep(&cfg, vary, values, &dir)?;
            println!("{}: wrote {} file(s) to {}", manifest.scenario, manifest.files.len(), dir.display());
        }
        Command::ListPresets => print!("{}", scenario::list_presets()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("openmap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
