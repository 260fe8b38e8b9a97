//! `sharedcache`: plan, bound, simulate and tabulate shared-cache coded
//! caching deliveries from a JSON config.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use sharedcache::delivery::{self, predicted_count_thm3};
use sharedcache::indexcoding::bounds_report;
use sharedcache::sim::{demand_sweep, rate_table, run_session_with_code, ChannelConfig};

use config::{InvalidOption, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "sharedcache", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission plan: human log on stdout, JSON to --out.
    Plan(Args),
    /// α lower bound, κ upper bound and, within limits, exact values.
    Bounds(Args),
    /// End-to-end session over an error-injecting channel.
    Simulate(Args),
    /// Rate table as CSV, with convex envelopes appended.
    Rates(Args),
    /// Plan lengths over all or sampled demands.
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

/// A run that completed but whose checks failed.
#[derive(Debug)]
struct CheckFailed(serde_json::Value);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0["message"].as_str().unwrap_or("check failed"))
    }
}

impl std::error::Error for CheckFailed {}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn cmd_plan(run: &RunConfig) -> Result<()> {
    let sys = &run.system;
    let plan = delivery::plan(run.scheme, &sys.config, &sys.association, sys.demands()?)?;
    let mut log = plan.log_lines().join("\n");
    log.push_str(&format!("\n{} transmissions, rate {}\n", plan.len(), plan.rate()));
    std::io::stdout().lock().write_all(log.as_bytes())?;
    if let Some(path) = &run.out {
        emit(&Some(path.clone()), &plan.to_json())?;
    }
    Ok(())
}

fn cmd_bounds(run: &RunConfig) -> Result<()> {
    let sys = &run.system;
    let report = bounds_report(&sys.config, &sys.association, sys.demands()?, run.oracles)?;
    emit(&run.out, &serde_json::to_string_pretty(&report)?)?;
    if !report.sandwich_holds() {
        return Err(CheckFailed(json!({
            "error": "sandwich",
            "message": "bounds out of order",
            "report": report,
        }))
        .into());
    }
    Ok(())
}

fn cmd_simulate(run: &RunConfig) -> Result<()> {
    let sys = &run.system;
    let channel = ChannelConfig {
        delta: run.delta,
        errors: run.errors,
    };
    let report = run_session_with_code(
        &sys.config,
        &sys.association,
        sys.demands()?,
        run.scheme,
        channel,
        run.code_delta,
        run.seed,
    )?;
    emit(&run.out, &report.to_json())?;
    if !report.all_decoded {
        return Err(CheckFailed(json!({
            "error": "decode",
            "message": format!("{} of {} corruption patterns not decoded", report.patterns_failed, report.patterns_tested),
            "baseline_ok": report.baseline_ok,
            "failures": report.failures,
        }))
        .into());
    }
    Ok(())
}

fn cmd_rates(run: &RunConfig) -> Result<()> {
    let sys = &run.system;
    let table = rate_table(&sys.config, &sys.association, sys.demands.as_ref(), run.delta)?;
    let mut csv = table.to_csv();
    if let (Some(d), Some(_)) = (sys.demands.as_ref(), sys.config.t()) {
        let plan = delivery::improved_delivery(&sys.config, &sys.association, d)?;
        let predicted = predicted_count_thm3(&sys.config, &sys.association, d)?;
        csv.push_str(&format!(
            "# configured t = {}: improved plan {} transmissions, closed-form count {}\n",
            plan.t,
            plan.len(),
            predicted
        ));
    }
    emit(&run.out, &csv)
}

fn cmd_sweep(run: &RunConfig) -> Result<()> {
    let sys = &run.system;
    let report = demand_sweep(&sys.config, &sys.association, run.sweep, run.scheme)?;
    emit(&run.out, &serde_json::to_string_pretty(&report)?)
}

fn error_json(err: &anyhow::Error) -> (serde_json::Value, u8) {
    if let Some(CheckFailed(v)) = err.downcast_ref::<CheckFailed>() {
        return (v.clone(), 1);
    }
    if let Some(InvalidOption(field, reason)) = err.downcast_ref::<InvalidOption>() {
        return (json!({"error": "invalid_option", "field": field, "message": reason}), 2);
    }
    if let Some(e) = err.downcast_ref::<sharedcache::Error>() {
        let field = match e {
            sharedcache::Error::InvalidField { field, .. } => Some(*field),
            sharedcache::Error::DemandOutOfRange { .. } => Some("demands"),
            _ => None,
        };
        let kind = match e {
            sharedcache::Error::InvalidField { .. }
            | sharedcache::Error::DemandOutOfRange { .. }
            | sharedcache::Error::NonIntegralT { .. } => "validation",
            sharedcache::Error::OracleLimit { .. } => "oracle_limit",
            sharedcache::Error::NoCode { .. } => "no_code",
            sharedcache::Error::SweepLimit { .. } => "sweep_limit",
            _ => "failure",
        };
        let code = if kind == "failure" { 1 } else { 2 };
        return (json!({"error": kind, "field": field, "message": e.to_string()}), code);
    }
    (json!({"error": "io", "message": format!("{err:#}")}), 2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&Args, fn(&RunConfig) -> Result<()>) = match &cli.command {
        Command::Plan(a) => (a, cmd_plan),
        Command::Bounds(a) => (a, cmd_bounds),
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Rates(a) => (a, cmd_rates),
        Command::Sweep(a) => (a, cmd_sweep),
    };
    let result = RunConfig::load(&args.config, &args.overrides).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away, e.g. `| head`
        Err(err)
            if err
                .downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (body, code) = error_json(&err);
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
