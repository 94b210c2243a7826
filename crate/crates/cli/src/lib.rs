//! Command-line front end: scenario drivers, configuration and artifacts.

pub mod artifacts;
pub mod config;
pub mod plot;
pub mod scenarios;

use std::path::PathBuf;

use clap::Parser;

use config::{load_file, resolve, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lubrimortar", about = "Lubricated contact of elastic bodies on a rigid plane")]
pub struct Args {
    /// JSON configuration; a previous summary.json is accepted too.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// cylinder_on_flat, pin_on_plane, stribeck_sweep or custom_mesh.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Dotted key=value, applied after the file (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Runs to completion and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let cfg = (|| {
        let file = args.config.as_deref().map(load_file).transpose()?;
        let scenario = args.scenario.as_deref().map(Scenario::parse).transpose().map_err(config::ConfigError)?;
        resolve(file.as_ref(), scenario, &args.overrides)
    })();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let arts = match scenarios::run(&cfg) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (status, code) = if arts.is_empty() {
        ("empty", EXIT_PARTIAL)
    } else if !arts.failures.is_empty() {
        ("solver_failure", EXIT_SOLVER)
    } else {
        ("ok", EXIT_OK)
    };
    match artifacts::emit(&args.out, &cfg, &arts, status) {
        Ok(files) => {
            eprintln!("{status}: {} steps, wrote {} files to {}", arts.steps.len(), files.len(), args.out.display());
            code
        }
        Err(e) => {
            eprintln!("cannot write artifacts to {}: {e}", args.out.display());
            EXIT_PARTIAL
        }
    }
}
