//! `chaplygin` — build principal metrics for constrained systems with
//! kinematic symmetry, integrate their dynamics, and verify the construction
//! numerically.
//!
//! Exit status: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaplygin_core::Error as CoreError;

use commands::CommandOutcome;
use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    name = "chaplygin",
    about = "Principal Riemannian metrics for constrained systems with kinematic symmetry",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System name: vertical-disk | nonholonomic-particle | veselova.
    #[arg(long)]
    system: Option<String>,
    /// Seed for every randomized check.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter overrides, repeatable: --param R=0.5
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Integrate the constrained trajectory and emit it as CSV.
    Simulate(CommonArgs),
    /// Evaluate the constructed principal metric at chart points (JSON).
    BuildMetric(CommonArgs),
    /// Recover the conformal exponent and its differential on a grid (JSON).
    RecoverPhi(CommonArgs),
    /// Run the verification suite and emit the report (JSON).
    Verify(CommonArgs),
    /// Compare segment length with boundary-value distance (JSON).
    Distance(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::BuildMetric(_) => "build-metric",
            Command::RecoverPhi(_) => "recover-phi",
            Command::Verify(_) => "verify",
            Command::Distance(_) => "distance",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::BuildMetric(a)
            | Command::RecoverPhi(a)
            | Command::Verify(a)
            | Command::Distance(a) => a,
        }
    }
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::to_string(&serde_json::json!({
        "error": { "kind": kind, "message": message }
    }))
    .expect("error json")
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", error_json(kind, message));
    ExitCode::from(code)
}

/// Exit code 3 for numerical failures surfaced from the library.
fn numerical_failure(e: &CoreError) -> ExitCode {
    let kind = match e {
        CoreError::SingularMatrix { .. } => "singular-matrix",
        CoreError::EvaluationFailure { .. } => "evaluation-failure",
        CoreError::NonFiniteState { .. } => "non-finite-state",
        CoreError::RankDeficient { .. } => "rank-deficient",
        CoreError::NotPhiSimple { .. } => "not-phi-simple",
        CoreError::NonClosedForm { .. } => "non-closed-form",
        CoreError::ConstraintViolated { .. } => "constraint-violated",
        CoreError::SingularSaddle(_) => "singular-saddle",
        CoreError::ShootingDiverged { .. } => "shooting-diverged",
        CoreError::InvalidParameters(_) => "invalid-parameters",
        CoreError::InvalidArgument(_) => "invalid-argument",
    };
    fail(kind, &e.to_string(), 3)
}

fn apply_overrides(mut cfg: RunConfig, args: &CommonArgs) -> Result<RunConfig, String> {
    if let Some(system) = &args.system {
        cfg.system = system.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    for kv in &args.params {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| format!("--param expects KEY=VALUE, got '{kv}'"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("--param {key}: '{value}' is not a number"))?;
        cfg.params.insert(key.to_string(), value);
    }
    Ok(cfg)
}

fn emit(outcome: &CommandOutcome, cfg: &RunConfig) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, &outcome.payload),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.payload.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let args = cli.command.args();

    let cfg = match &args.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return fail("config", &e.to_string(), 2),
        },
        None => RunConfig::default(),
    };
    let cfg = match apply_overrides(cfg, args) {
        Ok(cfg) => cfg,
        Err(msg) => return fail("config", &msg, 2),
    };
    let run = match cfg.validate(cli.command.name()) {
        Ok(run) => run,
        Err(e @ ConfigError::Parse(_)) => return fail("config", &e.to_string(), 2),
        Err(e @ ConfigError::Validation(_)) => return fail("config", &e.to_string(), 2),
    };

    let result = match &cli.command {
        Command::Simulate(_) => commands::cmd_simulate(&run),
        Command::BuildMetric(_) => commands::cmd_build_metric(&run),
        Command::RecoverPhi(_) => commands::cmd_recover_phi(&run),
        Command::Verify(_) => commands::cmd_verify(&run),
        Command::Distance(_) => commands::cmd_distance(&run),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome, &run.config) {
                return fail("io", &e.to_string(), 3);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => numerical_failure(&e),
    }
}
