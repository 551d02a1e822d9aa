use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freecap_cli::config::{load_file, merge, Command};
use freecap_cli::{execute, manifest, CliError, ExperimentConfig, Manifest, OUTDIR_ENV};

#[derive(Parser)]
#[command(name = "freecap", version, about = "Seeded free entropy and free capacity experiments")]
struct Cli {
    /// Directory that receives one subdirectory per run.
    #[arg(long, global = true, env = OUTDIR_ENV, default_value = "results")]
    outdir: PathBuf,

    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Opts {
    /// JSON config; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    params: ExperimentConfig,
}

#[derive(Subcommand)]
enum Sub {
    /// Logarithmic capacity, Robin constant, chi and kappa of a union of intervals.
    Capacity(Opts),
    /// Equilibrium measure on a grid, or a discretized reference density.
    Eqmeasure(Opts),
    /// Operator norms of a polynomial in independent GUE matrices.
    GueNorms(Opts),
    /// Gaussian measure of a microstate set.
    GammaMeasure(Opts),
    /// Lebesgue volume of a microstate set, normalized.
    Volume(Opts),
    /// Greedy net sizes for operator-norm balls and the fitted exponent.
    Covering(Opts),
    /// Covering-dimension slope of a microstate family.
    Dimension(Opts),
    /// Mean GUE norms against the limiting norm as k grows.
    HtCheck(Opts),
    /// Concentration of k^{-1} Tr A^2 on semicircular microstates.
    TracePinning(Opts),
    /// Run a JSON config file; the command is taken from the file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun the experiment recorded in a manifest.
    Replay { manifest: PathBuf },
}

fn config_for(command: Command, opts: Opts) -> Result<ExperimentConfig, CliError> {
    let mut flags = opts.params;
    flags.command = Some(command);
    let Some(path) = opts.config else {
        return Ok(flags);
    };
    let file = load_file(&path)?;
    if file.command.is_some_and(|c| c != command) {
        return Err(CliError::Config(format!(
            "{} is a `{}` config, not `{}`",
            path.display(),
            file.command.unwrap().name(),
            command.name()
        )));
    }
    let (merged, notes) = merge(&flags, &file)?;
    for n in notes {
        eprintln!("note: {n}");
    }
    Ok(merged)
}

fn main_inner(cli: Cli) -> Result<(PathBuf, Manifest), CliError> {
    let (outdir, workers) = (cli.outdir, cli.workers);
    let cfg = match cli.command {
        Sub::Capacity(o) => config_for(Command::Capacity, o)?,
        Sub::Eqmeasure(o) => config_for(Command::Eqmeasure, o)?,
        Sub::GueNorms(o) => config_for(Command::GueNorms, o)?,
        Sub::GammaMeasure(o) => config_for(Command::GammaMeasure, o)?,
        Sub::Volume(o) => config_for(Command::Volume, o)?,
        Sub::Covering(o) => config_for(Command::Covering, o)?,
        Sub::Dimension(o) => config_for(Command::Dimension, o)?,
        Sub::HtCheck(o) => config_for(Command::HtCheck, o)?,
        Sub::TracePinning(o) => config_for(Command::TracePinning, o)?,
        Sub::Run { config } => load_file(&config)?,
        Sub::Replay { manifest } => return manifest::replay(&manifest, &outdir, workers),
    };
    execute(&cfg, &outdir, workers)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok((dir, manifest)) => {
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("wrote {}", dir.join("manifest.json").display());
            println!("{}", serde_json::to_string_pretty(&manifest.results).expect("results serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
