//! `forge`: batch synthesis and verification of toric anti-self-dual metrics.
//!
//! Exit codes: 0 ok, 1 a mathematical gate failed, 2 usage or config error,
//! 3 a numerical routine did not converge.

mod commands;
mod engine;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toric_asd::config::{builtin, RunConfig, BUILTINS};
use toric_asd::Error;

#[derive(Parser, Debug)]
#[command(
    name = "forge",
    version,
    about = "Synthesize and verify toric anti-self-dual metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON, "schema": 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's "out").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config's "jobs").
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance override, e.g. `asd=1e-5`; may be repeated.
    #[arg(long = "tol-override", global = true, value_parser = parse_override)]
    tol_override: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
enum Command {
    /// Check the seed data and the Čech period.
    Validate,
    /// Write the metric on the configured grid to metric.csv.
    Metric,
    /// Run the verification gates and write report.json.
    Verify,
    /// Print a built-in configuration.
    Example { name: String },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn gate(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn non_convergence(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    /// Library errors raised outside the per-point loops.
    pub fn from_core(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Unsupported(_) => 2,
            Error::NoConvergence(_) | Error::Resolution { .. } | Error::Numerical(_) => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config is required"))?;
    let text =
        fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(CliError::from_core)?;
    let overrides: BTreeMap<String, f64> = cli.tol_override.iter().cloned().collect();
    cfg.tolerances
        .apply_overrides(&overrides)
        .map_err(CliError::from_core)?;
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::config("--jobs must be positive"));
        }
        cfg.jobs = Some(j);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Example { name } = &cli.command {
        let cfg = builtin(name).map_err(|e| CliError::config(format!("{e}; known: {}", BUILTINS.join(", "))))?;
        let text = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::config(e.to_string()))? + "\n";
        if let Some(dir) = &cli.out {
            fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{name}.json"));
            fs::write(&path, &text).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        }
        print!("{text}");
        return Ok(());
    }

    let cfg = load_config(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| "forge-out".into());
    fs::create_dir_all(&out).map_err(|e| CliError::config(format!("cannot create {}: {e}", out.display())))?;
    let data = cfg.holo_data().map_err(CliError::from_core)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::config(e.to_string()))?;
    log::info!(
        "{:?} with {} threads into {}",
        cli.command,
        pool.current_num_threads(),
        out.display()
    );
    pool.install(|| match cli.command {
        Command::Validate => commands::run_validate(&cfg, &data, &out),
        Command::Metric => commands::run_metric(&cfg, &data, &out),
        Command::Verify => commands::run_verify(&cfg, &data, &out),
        Command::Example { .. } => unreachable!(),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FORGE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forge: {e}");
            ExitCode::from(e.code)
        }
    }
}
