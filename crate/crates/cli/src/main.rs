//! `cwave`: config-driven experiments for the coupled wave system.
//!
//! Exit status: 0 on success, 2 for configuration or validation errors,
//! 3 for numerical failures (details in `<out>/error.json`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{ExperimentConfig, Mode};

#[derive(Parser)]
#[command(
    name = "cwave",
    version,
    about = "Forward modelling and recovery for a 2x2 coupled wave system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a receiver trace.
    Forward(Common),
    /// Recover the unknown profile from a trace.
    Invert(Common),
    /// Evaluate the four-term identity and, optionally, the comparison audit.
    Identity(Common),
    /// Quadrature residuals against analytic areas and volumes.
    Geomcheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`; default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

fn error_kind(e: &coupled_wave::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, common) = match cli.command {
        Command::Forward(c) => (Mode::Forward, c),
        Command::Invert(c) => (Mode::Invert, c),
        Command::Identity(c) => (Mode::Identity, c),
        Command::Geomcheck(c) => (Mode::Geomcheck, c),
    };

    let (cfg, base) = match &common.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(cfg) => (cfg, path.parent().unwrap_or(Path::new(".")).to_path_buf()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => (ExperimentConfig::default(), PathBuf::from(".")),
    };
    if let Err(e) = cfg.validate(mode, &base) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = common
        .out
        .or_else(|| cfg.output.dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("out"));

    match run::run(mode, &cfg, &base, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let diag = json!({ "error": error_kind(&e), "message": e.to_string(), "mode": mode });
            let written = std::fs::create_dir_all(&out).and_then(|_| {
                std::fs::write(
                    out.join("error.json"),
                    serde_json::to_string_pretty(&diag).unwrap() + "\n",
                )
            });
            if let Err(w) = written {
                eprintln!("error: could not write error.json: {w}");
            }
            ExitCode::from(3)
        }
    }
}
