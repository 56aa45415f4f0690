//! Declarative experiment configs.
//!
//! One JSON document per experiment; unknown fields are rejected so stale
//! configs fail loudly instead of silently ignoring a typo.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use gclab_core::procgen::{Marginal, ProcessKind, ProcessSpec, TransitionModel};
use gclab_core::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub process: ProcessConfig,
    pub task: TaskConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub label: String,
    pub kind: ProcessKindConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessKindConfig {
    IidUniform { lo: f64, hi: f64 },
    IidNormal { mean: f64, sd: f64 },
    Ar1 { rho: f64, innovation_sd: f64 },
    Markov {
        states: Vec<f64>,
        rows: Vec<Vec<f64>>,
        #[serde(default)]
        pi: Option<Vec<f64>>,
    },
    MDependent { m: usize, base: BaseMarginalConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseMarginalConfig {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl BaseMarginalConfig {
    fn to_marginal(&self) -> Marginal {
        match *self {
            BaseMarginalConfig::Uniform { lo, hi } => Marginal::Uniform { lo, hi },
            BaseMarginalConfig::Normal { mean, sd } => Marginal::Normal { mean, sd },
        }
    }
}

impl ProcessConfig {
    /// Builds and validates the process spec.
    pub fn to_spec(&self) -> Result<ProcessSpec> {
        let kind = match &self.kind {
            ProcessKindConfig::IidUniform { lo, hi } => {
                ProcessKind::Iid(Marginal::Uniform { lo: *lo, hi: *hi })
            }
            ProcessKindConfig::IidNormal { mean, sd } => {
                ProcessKind::Iid(Marginal::Normal { mean: *mean, sd: *sd })
            }
            ProcessKindConfig::Ar1 { rho, innovation_sd } => ProcessKind::Ar1 {
                rho: *rho,
                innovation_sd: *innovation_sd,
            },
            ProcessKindConfig::Markov { states, rows, pi } => {
                let model = match pi {
                    Some(pi) => TransitionModel::new(
                        states.clone(),
                        rows.iter().flatten().copied().collect(),
                        pi.clone(),
                    )?,
                    None => TransitionModel::from_matrix(states.clone(), rows)?,
                };
                ProcessKind::Markov(model)
            }
            ProcessKindConfig::MDependent { m, base } => ProcessKind::MDependent {
                m: *m,
                base: base.to_marginal(),
            },
        };
        ProcessSpec::new(kind, self.label.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    Exact,
    MonteCarlo { reps: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Threshold for the indicator-event modulus.
    pub x: f64,
    pub reps: u32,
    pub path_length: usize,
}

/// Injected covariance sequence `Cov(h) = c·h^{-exponent}` with `var0` at lag 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCovConfig {
    pub var0: f64,
    pub c: f64,
    pub exponent: f64,
    #[serde(default = "default_synthetic_label")]
    pub label: String,
}

fn default_synthetic_label() -> String {
    "synthetic-covariances".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskConfig {
    Generate {
        n: usize,
    },
    MixingProfile {
        lags: Vec<u32>,
        #[serde(default)]
        deltas: Vec<f64>,
        #[serde(default)]
        estimator: Option<EstimatorConfig>,
    },
    CovcheckSweep {
        models: usize,
        k_min: usize,
        k_max: usize,
        lags: Vec<u32>,
    },
    GcipScan {
        delta: f64,
        q_max: u32,
        x_grid: Vec<f64>,
        mode: ModeConfig,
        #[serde(default)]
        synthetic_cov: Option<SyntheticCovConfig>,
    },
    KsStudy {
        n_grid: Vec<usize>,
        reps: u32,
        #[serde(default)]
        dkw: bool,
    },
    Entropy {
        epsilons: Vec<f64>,
        universe: Vec<f64>,
        max_n: u32,
    },
    GcVerdict {
        epsilons: Vec<f64>,
        delta: f64,
        q_max: u32,
        x_grid: Vec<f64>,
        #[serde(default)]
        synthetic_cov: Option<SyntheticCovConfig>,
    },
}


impl TaskConfig {
    pub fn name(&self) -> &'static str {
        match self {
            TaskConfig::Generate { .. } => "generate",
            TaskConfig::MixingProfile { .. } => "mixing_profile",
            TaskConfig::CovcheckSweep { .. } => "covcheck_sweep",
            TaskConfig::GcipScan { .. } => "gcip_scan",
            TaskConfig::KsStudy { .. } => "ks_study",
            TaskConfig::Entropy { .. } => "entropy",
            TaskConfig::GcVerdict { .. } => "gc_verdict",
        }
    }
}
