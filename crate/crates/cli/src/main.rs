use std::path::PathBuf;
use std::process::ExitCode;

use brenke_cli::commands::bound_summary;
use brenke_cli::{cmd_bounds, cmd_converge, cmd_eval, cmd_moments, cmd_validate, CliError, ExperimentConfig};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Validate,
    Eval,
    Moments,
    Converge,
    Bounds,
}

/// Runs operator, moment, convergence and error-bound experiments.
#[derive(Parser, Debug)]
#[command(name = "brenke-approx", version)]
struct Args {
    command: Command,
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `family` in the [family] section.
    #[arg(long)]
    family: Option<String>,
    /// Test function for `eval`.
    #[arg(long = "f")]
    func: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    x: Option<f64>,
    /// CSV destination; defaults to the configured path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<i32, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(f) = args.family {
        cfg.family.family = f;
    }
    let csv = match args.command {
        Command::Validate => {
            let v = cmd_validate(&cfg);
            println!("{}", v.text);
            return Ok(v.code);
        }
        Command::Eval => {
            let f = args.func.ok_or_else(|| CliError::Usage("eval needs --f".into()))?;
            let n = args.n.ok_or_else(|| CliError::Usage("eval needs --n".into()))?;
            let x = args.x.ok_or_else(|| CliError::Usage("eval needs --x".into()))?;
            print!("{}", cmd_eval(&cfg, &f, n, x)?);
            return Ok(0);
        }
        Command::Moments => cmd_moments(&cfg)?,
        Command::Converge => cmd_converge(&cfg)?,
        Command::Bounds => {
            let csv = cmd_bounds(&cfg)?;
            eprintln!("{}", bound_summary(&csv));
            csv
        }
    };
    match args.out.or(cfg.output_path) {
        Some(path) => std::fs::write(&path, csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
