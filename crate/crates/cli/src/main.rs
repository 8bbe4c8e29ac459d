//! `monopole`: command-line front end for the monopole-core library.
//!
//! Exit status: 0 on success, 1 when acceptance criteria fail or on I/O
//! errors, 2 on invalid input, 3 on numerical failure.

mod commands;
mod config;
mod error;
mod models;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monopole_core::tolerances::Tolerances;
use monopole_core::verify::{verify_all, CRITERIA};
use serde::{Deserialize, Serialize};

use crate::config::{resolve, Config};
use crate::error::CliError;
use crate::output::{emit, json_bytes, Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "monopole", version, about = "Artificial monopoles in driven quantum systems")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
struct GlobalArgs {
    /// TOML or JSON file; its values override flags
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    /// Worker threads for sweeps and grid integrals
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
    /// Multiply every verification tolerance by this factor
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tol_scale: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Globals {
    out: Option<PathBuf>,
    format: Option<Format>,
    workers: Option<usize>,
    tol_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Berry phases of a spin-1/2 on latitude contours
    TwoLevel(commands::TwoLevelArgs),
    /// Charged particle in a monopole field
    Orbit(commands::OrbitArgs),
    /// Floquet modes of a driven model from the truncated Floquet matrix
    Floquet(commands::FloquetArgs),
    /// Rotating-wave driven qubit, closed forms next to Floquet numerics
    Rwa(commands::RwaArgs),
    /// Qubit coupled to a resonator
    Jaynes(commands::JaynesArgs),
    /// Driven spin j
    Spinj(commands::SpinjArgs),
    /// Lambda system with orbital angular momentum beams
    Lambda(commands::LambdaArgs),
    /// Chern numbers on a sphere of parameters
    Chern(commands::ChernArgs),
    /// Sweep a model parameter over a range
    Sweep(sweep::SweepArgs),
    /// Run the acceptance suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
struct VerifyArgs {
    /// Criterion id, name or group; repeat or comma-separate
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("monopole: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.global.config.as_deref().map(Config::load).transpose()?;
    let globals: Globals = resolve(Globals::default(), &cli.global, config.as_ref(), "")?;
    if let Some(w) = globals.workers {
        if w == 0 {
            return Err(CliError::Validation("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let tol_scale = globals.tol_scale.unwrap_or(1.0);
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(CliError::Validation(format!("--tol-scale must be positive, got {tol_scale}")));
    }
    let cfg = config.as_ref();
    let out = globals.out.as_deref();
    let format = globals.format.unwrap_or_default();

    let table = match &cli.command {
        Command::TwoLevel(a) => commands::two_level(a, cfg)?,
        Command::Orbit(a) => commands::orbit(a, cfg)?,
        Command::Floquet(a) => commands::floquet(a, cfg)?,
        Command::Rwa(a) => commands::rwa(a, cfg)?,
        Command::Jaynes(a) => commands::jaynes(a, cfg)?,
        Command::Spinj(a) => commands::spinj(a, cfg)?,
        Command::Lambda(a) => commands::lambda(a, cfg)?,
        Command::Chern(a) => commands::chern(a, cfg)?,
        Command::Sweep(a) => {
            let outcome = sweep::sweep(a, cfg)?;
            // partial results are written before the failure is reported
            emit(&outcome.table.render(outcome.format.unwrap_or(format))?, out)?;
            return match outcome.failure {
                Some(f) => Err(CliError::Numerical(f)),
                None => Ok(()),
            };
        }
        Command::Verify(a) => return verify(a, cfg, tol_scale, globals.format, out),
    };
    if let Some(bad) = table.non_finite() {
        return Err(CliError::Numerical(bad));
    }
    emit(&table.render(format)?, out)
}

fn verify(
    args: &VerifyArgs,
    config: Option<&Config>,
    tol_scale: f64,
    format: Option<Format>,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let none = serde_json::Map::new();
    let tol: Tolerances = resolve(Tolerances::default(), &none, config, "tolerances")?;
    let tol = tol.scaled(tol_scale);
    for f in &args.only {
        if !CRITERIA.iter().any(|c| c.matches(f)) {
            return Err(CliError::Validation(format!("--only: no criterion matches `{f}`")));
        }
    }
    let report = verify_all(&tol, &args.only);
    let bytes = match format {
        None => {
            let mut text = String::new();
            for c in &report.criteria {
                text.push_str(&c.summary_line());
                text.push('\n');
            }
            let failed = report.failures().len();
            text.push_str(&format!(
                "{} of {} criteria passed in {:.2}s\n",
                report.criteria.len() - failed,
                report.criteria.len(),
                report.runtime_s
            ));
            text.into_bytes()
        }
        Some(Format::Json) => json_bytes(&serde_json::json!({
            "schema": format!("monopole.verify.v{}", output::SCHEMA_VERSION),
            "tol_scale": tol_scale,
            "tolerances": tol,
            "report": report,
        }))?,
        Some(Format::Csv) => {
            let mut t = Table::new(
                "verify",
                &["id", "name", "group", "passed", "residual", "tolerance", "runtime_s", "failed_checks", "error"],
                serde_json::Value::Null,
            );
            for c in &report.criteria {
                let failed: Vec<&str> = c.checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
                t.push(vec![
                    Cell::Int(c.id.into()),
                    c.name.into(),
                    c.group.into(),
                    (if c.passed { "true" } else { "false" }).into(),
                    c.residual.into(),
                    c.tolerance.into(),
                    c.runtime_s.into(),
                    failed.join(";").into(),
                    c.error.clone().unwrap_or_default().into(),
                ]);
            }
            t.render(Format::Csv)?
        }
    };
    emit(&bytes, out)?;
    let failures = report.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = failures.iter().map(|c| c.name).collect();
        Err(CliError::Failed(format!("{} criteria failed: {}", failures.len(), names.join(", "))))
    }
}
