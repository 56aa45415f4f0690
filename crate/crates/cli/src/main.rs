//! `gclab` — experiment runner for the dependent-sequence verification lab.
//!
//! Subcommands: `run <config.json>`, `report <dir>`, `validate <config.json>`.
//! Exit codes: 0 success, 2 config parse error, 3 validation error,
//! 4 feasibility error, 5 numeric failure, 1 anything else (I/O).
//! Errors go to stderr as one JSON line `{"category": ..., "message": ...}`.

mod config;
mod record;
mod report;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use gclab_core::LabError;
use record::{sha256_hex, OutputWriter, RunRecord};

/// Environment variable naming the output root; relative `output_dir`s are
/// resolved against it.
const OUTPUT_ROOT_ENV: &str = "GCLAB_OUTPUT_ROOT";

#[derive(Parser)]
#[command(name = "gclab", version, about = "dependent-sequence verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write its artifacts.
    Run { config: PathBuf },
    /// Print a digest of a completed run directory.
    Report { dir: PathBuf },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
}

struct CliError {
    code: u8,
    category: &'static str,
    message: String,
}

impl CliError {
    fn parse(message: String) -> Self {
        CliError { code: 2, category: "config_parse", message }
    }
    fn io(message: String) -> Self {
        CliError { code: 1, category: "io", message }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        let code = match e {
            LabError::Validation(_) | LabError::InsufficientData(_) | LabError::FitUndefined(_) => 3,
            LabError::Feasibility(_) => 4,
            LabError::Numeric(_) => 5,
        };
        CliError { code, category: e.category_static(), message: e.to_string() }
    }
}

trait CategoryStatic {
    fn category_static(&self) -> &'static str;
}

impl CategoryStatic for LabError {
    fn category_static(&self) -> &'static str {
        self.category()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Report { dir } => cmd_report(&dir),
        Command::Validate { config } => cmd_validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "category": e.category, "message": e.message })
            );
            ExitCode::from(e.code)
        }
    }
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read config {}: {e}", path.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("config parse error: {e}")))?;
    Ok((config, text))
}

fn resolve_output_dir(config: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if config.output_dir.is_relative() => {
            PathBuf::from(root).join(&config.output_dir)
        }
        _ => config.output_dir.clone(),
    }
}

fn cmd_run(path: &Path) -> Result<(), CliError> {
    let (config, text) = load_config(path)?;
    config.process.to_spec().map_err(CliError::from)?;

    let started = chrono::Utc::now().to_rfc3339();
    let dir = resolve_output_dir(&config);
    let mut out = OutputWriter::new(&dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let summary = tasks::execute(&config, &mut out).map_err(CliError::from)?;
    let finished = chrono::Utc::now().to_rfc3339();

    let record = RunRecord {
        experiment_id: config.experiment_id.clone(),
        config_digest: sha256_hex(text.as_bytes()),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        task: config.task.name().to_string(),
        started,
        finished,
        summary,
        manifest: out.into_manifest(),
    };
    let record_json =
        serde_json::to_string_pretty(&record).expect("run record serializes");
    std::fs::write(dir.join("run_record.json"), &record_json)
        .map_err(|e| CliError::io(format!("cannot write run record: {e}")))?;
    println!(
        "run {} complete: task {} -> {}",
        record.experiment_id,
        record.task,
        dir.display()
    );
    Ok(())
}

fn cmd_report(dir: &Path) -> Result<(), CliError> {
    let record_path = dir.join("run_record.json");
    let text = std::fs::read_to_string(&record_path).map_err(|e| CliError {
        code: 3,
        category: "validation",
        message: format!("no run record at {}: {e}", record_path.display()),
    })?;
    let record: RunRecord = serde_json::from_str(&text).map_err(|e| CliError {
        code: 3,
        category: "validation",
        message: format!("corrupt run record: {e}"),
    })?;
    print!("{}", report::render(&record));
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let (config, _) = load_config(path)?;
    config.process.to_spec().map_err(CliError::from)?;
    validate_task(&config).map_err(CliError::from)?;
    println!("config ok: {} ({})", config.experiment_id, config.task.name());
    Ok(())
}

/// Cheap parameter validation without running anything heavy.
fn validate_task(config: &ExperimentConfig) -> Result<(), LabError> {
    use config::TaskConfig;
    use gclab_core::gcip::{GcipMode, GcipParams};
    let c = &config.task;
    match c {
        TaskConfig::Generate { n } => {
            if *n == 0 {
                return Err(LabError::Validation("n must be >= 1".into()));
            }
        }
        TaskConfig::MixingProfile { lags, deltas, .. } => {
            if lags.is_empty() {
                return Err(LabError::Validation("lags must be nonempty".into()));
            }
            for &d in deltas {
                gclab_core::mixing::RateThreshold::new(d)?;
            }
        }
        TaskConfig::CovcheckSweep { models, k_min, k_max, lags } => {
            if *models == 0 || lags.is_empty() || k_min < &1 || k_min > k_max {
                return Err(LabError::Validation("bad sweep parameters".into()));
            }
        }
        TaskConfig::GcipScan { delta, q_max, x_grid, mode, .. } => {
            GcipParams {
                delta: *delta,
                q_max: *q_max,
                x_grid: x_grid.clone(),
                mode: match mode {
                    config::ModeConfig::Exact => GcipMode::ExactMarkov,
                    config::ModeConfig::MonteCarlo { reps } => {
                        GcipMode::MonteCarlo { reps: *reps }
                    }
                },
            }
            .validate()?;
        }
        TaskConfig::KsStudy { n_grid, reps, .. } => {
            if *reps == 0 || n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LabError::Validation(
                    "n_grid must be ascending and reps >= 1".into(),
                ));
            }
        }
        TaskConfig::Entropy { epsilons, universe, max_n } => {
            if epsilons.iter().any(|&e| !(e > 0.0)) || epsilons.is_empty() {
                return Err(LabError::Validation("epsilons must be positive".into()));
            }
            if universe.is_empty() {
                return Err(LabError::Validation("universe must be nonempty".into()));
            }
            if *max_n > gclab_core::entropy::VC_MAX_CARDINALITY {
                return Err(LabError::Feasibility(format!(
                    "max_n {} exceeds the enumeration cap",
                    max_n
                )));
            }
        }
        TaskConfig::GcVerdict { epsilons, delta, q_max, x_grid, .. } => {
            if epsilons.is_empty() {
                return Err(LabError::Validation("epsilons must be nonempty".into()));
            }
            GcipParams {
                delta: *delta,
                q_max: *q_max,
                x_grid: x_grid.clone(),
                mode: GcipMode::ExactMarkov,
            }
            .validate()?;
        }
    }
    Ok(())
}
