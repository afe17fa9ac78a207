use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use semipar_lab::commands::run;
use semipar_lab::config::{Command, RunConfig};
use semipar_lab::{LabError, LabResult};

/// Semi-parabolic Hénon experiments.
#[derive(Parser, Debug)]
#[command(name = "semipar", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rotation number p/q.
    #[arg(long)]
    pq: Option<String>,
    /// Comma-separated t values.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Comma-separated complex a values (x, x+yi).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    res: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Half width of the a-window for connectivity-scan.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

fn build(cli: &Cli) -> LabResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = RunConfig::parse(&std::fs::read_to_string(path)?)?;
            if cfg.command != cli.command {
                return Err(LabError::Config(format!(
                    "config file is for '{}', not '{}'",
                    cfg.command, cli.command
                )));
            }
            cfg
        }
        None => RunConfig::defaults(cli.command),
    };
    let flags = [
        ("pq", &cli.pq),
        ("t", &cli.t),
        ("a", &cli.a),
        ("angles", &cli.angles),
        ("degree", &cli.degree),
        ("iters", &cli.iters),
        ("res", &cli.res),
        ("samples", &cli.samples),
        ("steps", &cli.steps),
        ("tol", &cli.tol),
        ("window", &cli.window),
        ("seed", &cli.seed),
        ("out", &cli.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build(&cli).and_then(|cfg| run(&cfg).map(|()| cfg)) {
        Ok(cfg) => {
            println!("{} done, outputs in {}", cfg.command, cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
