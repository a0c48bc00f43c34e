use clap::Parser;
use mcnd::cli::{parse_config_with, run_mode, setup, Mode};
use mcnd::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Capacity-driven curvature flows: radial, smooth and flat runs, comparisons
/// and the property suite.
#[derive(Parser, Debug)]
#[command(name = "mcnd", version)]
struct Args {
    /// Configuration file (`key = value` lines).
    config: PathBuf,
    /// Overrides `mode`.
    #[arg(long)]
    mode: Option<String>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return config_error(format!("cannot read {}: {e}", args.config.display())),
    };
    let mut overrides = Vec::new();
    if let Some(m) = args.mode {
        overrides.push(("mode", m));
    }
    if let Some(dir) = args.out {
        overrides.push(("output.dir", dir.display().to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("seed", seed.to_string()));
    }
    let cfg = match parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    if !matches!(cfg.mode, Mode::Props | Mode::Radial) {
        if let Err(e) = setup(&cfg) {
            return config_error(e);
        }
    }
    match run_mode(&cfg) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config { .. }) => config_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
