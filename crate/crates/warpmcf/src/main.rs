use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warpmcf::{
    apply_env_overrides, conformance, load_config, load_state, run_scenario_with, ExitStatus, RunConfig, RunKind,
    RunOptions,
};

/// Exit code for failures outside the documented statuses (unwritable
/// output, unreadable snapshot, failed conformance check).
const EXIT_OTHER: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "warpmcf", version, about = "Mean-curvature flow of graphs in warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the scenario described by a config file
    Flow {
        config: PathBuf,
        /// continue from a state snapshot instead of the initial data
        #[arg(long)]
        restart: Option<PathBuf>,
        /// override a config key, `key=value` (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check geometry and pointwise fields against the oracles; prints JSON
    Verify {
        /// every catalog (base, warp) pair instead of the hyperbolic model only
        #[arg(long)]
        catalog: bool,
    },
    /// Run a profile-curve scenario in hyperbolic space
    Counterexample {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run one scenario per value of a key
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...`; each value becomes its own run
        #[arg(long)]
        param: String,
    },
}

fn split_assignment(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("`{s}` is not of the form key=value")),
    }
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>, String> {
    raw.iter().map(|s| split_assignment(s)).collect()
}

fn load(path: &Path, overrides: &[(String, String)]) -> Result<RunConfig, ExitCode> {
    match load_config(path, overrides) {
        Ok(mut c) => {
            apply_env_overrides(&mut c);
            Ok(c)
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            Err(ExitCode::from(ExitStatus::ConfigError.code() as u8))
        }
    }
}

fn execute(config: &RunConfig, options: RunOptions) -> u8 {
    match run_scenario_with(config, options) {
        Ok(outcome) => {
            for e in &outcome.report.errors {
                eprintln!("{}: {e}", config.name);
            }
            if let Some(c) = &outcome.report.counterexample {
                println!("{}: {}; {}", config.name, c.equidistant_verdict, c.geodesic_verdict);
            }
            println!(
                "{}: {:?} (exit {}), artifacts in {}",
                config.name,
                outcome.status,
                outcome.status.code(),
                outcome.dir.display()
            );
            outcome.status.code() as u8
        }
        Err(e) => {
            eprintln!("{}: cannot write artifacts: {e}", config.name);
            EXIT_OTHER
        }
    }
}

fn config_error(message: String) -> ExitCode {
    eprintln!("{message}");
    ExitCode::from(ExitStatus::ConfigError.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Flow { config, restart, overrides } => {
            let overrides = match parse_overrides(&overrides) {
                Ok(o) => o,
                Err(e) => return config_error(e),
            };
            let cfg = match load(&config, &overrides) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let restart = match restart.map(|p| load_state(&p).map_err(|e| format!("{}: {e}", p.display()))).transpose() {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_OTHER);
                }
            };
            ExitCode::from(execute(&cfg, RunOptions { restart }))
        }
        Command::Counterexample { config, overrides } => {
            let overrides = match parse_overrides(&overrides) {
                Ok(o) => o,
                Err(e) => return config_error(e),
            };
            let cfg = match load(&config, &overrides) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if !matches!(cfg.run, RunKind::Counterexample(_)) {
                return config_error(format!("{}: `scenario` is missing; this is a graph-flow config", config.display()));
            }
            ExitCode::from(execute(&cfg, RunOptions::default()))
        }
        Command::Verify { catalog } => {
            let report = conformance(catalog);
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_OTHER)
            }
        }
        Command::Sweep { config, param } => {
            let (key, values) = match split_assignment(&param) {
                Ok(kv) => kv,
                Err(e) => return config_error(e),
            };
            let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
            if values.is_empty() {
                return config_error(format!("--param {key}: no values given"));
            }
            let mut worst = 0u8;
            for v in values {
                let code = match load(&config, &[(key.clone(), v.to_string())]) {
                    Ok(mut cfg) => {
                        cfg.name = format!("{}.{key}={}", cfg.name, v.replace(['/', '\\'], "_"));
                        execute(&cfg, RunOptions::default())
                    }
                    Err(_) => ExitStatus::ConfigError.code() as u8,
                };
                worst = worst.max(code);
            }
            ExitCode::from(worst)
        }
    }
}
