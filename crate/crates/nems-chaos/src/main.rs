//! `nems-chaos` binary: run one named experiment, write CSVs + manifest.
//!
//! Exit codes: 0 success, 2 configuration error (including CLI misuse),
//! 3 runtime failure (numerical error or I/O while writing artifacts).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nems_chaos::{
    parse_config, run_experiment, CliError, CliOverrides, Experiment, Result, RunConfig,
    RunManifest,
};

#[derive(Parser)]
#[command(
    name = "nems-chaos",
    version,
    about = "Kicked-cantilever / spin-chaos experiments as deterministic CSV artifacts",
    after_help = "Experiments: phase-portrait, spin-dynamics, psd, coherence, recurrence, \
                  levels, diffusion, correlations, ttsb.\n\
                  Output directory precedence: --out, config output_dir, $NEMS_OUT, ./nems-out."
)]
struct Cli {
    /// Experiment to run (see the list below)
    experiment: String,

    /// TOML config file; every key is optional, so an empty or absent file
    /// runs the documented defaults
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override the kick strength with a single K value
    #[arg(long = "K", value_name = "REAL")]
    k: Option<f64>,

    /// Override the number of kicks
    #[arg(long, value_name = "INT")]
    kicks: Option<usize>,

    /// Override the seed list with a single seed
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,

    /// Output directory for CSVs and manifest.json
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<RunManifest> {
    let experiment: Experiment = cli.experiment.parse()?;
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("config file {}: {e}", path.display()))
        })?,
        None => String::new(),
    };
    let file = parse_config(&text)?;
    let overrides = CliOverrides {
        k: cli.k,
        kicks: cli.kicks,
        seed: cli.seed,
        out: cli.out,
    };
    let env_out = std::env::var_os("NEMS_OUT").map(PathBuf::from);
    let cfg = RunConfig::resolve(experiment, file, &overrides, env_out)?;
    run_experiment(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(manifest) => {
            println!(
                "{}: wrote {} artifact(s) + manifest.json to {} in {} ms",
                manifest.experiment,
                manifest.files.len(),
                manifest.config.output_dir.display(),
                manifest.duration_ms
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("nems-chaos: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
