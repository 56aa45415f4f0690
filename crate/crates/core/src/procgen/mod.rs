//! Stationary sequence generators with known dependence and known marginals.
//!
//! Four process families are supported: iid draws from a declared marginal,
//! a Gaussian AR(1) started from its stationary law, finite-state Markov
//! chains started from the stationary distribution, and m-dependent moving
//! sums of iid base draws (standardized). Each family exposes its exact
//! stationary marginal CDF.
//!
//! Generation is a pure function of `(spec, n, seed, stream)`.

mod marginal;
mod markov;

pub use marginal::{Marginal, MarginalDist};
pub use markov::TransitionModel;

pub(crate) use markov::mat_mul;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rng::{next_unit_open, stream_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Iid(Marginal),
    Ar1 { rho: f64, innovation_sd: f64 },
    Markov(TransitionModel),
    MDependent { m: usize, base: Marginal },
}

/// Declarative description of a stationary generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub label: String,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, label: impl Into<String>) -> Result<Self> {
        let spec = ProcessSpec {
            kind,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ProcessKind::Iid(m) => m.validate(),
            ProcessKind::Ar1 { rho, innovation_sd } => {
                if !(rho.abs() < 1.0) {
                    return Err(LabError::Validation(format!(
                        "AR(1) requires |rho| < 1 for stationarity, got {rho}"
                    )));
                }
                if !(innovation_sd.is_finite() && *innovation_sd > 0.0) {
                    return Err(LabError::Validation(format!(
                        "AR(1) innovation sd must be positive, got {innovation_sd}"
                    )));
                }
                Ok(())
            }
            ProcessKind::Markov(model) => model.validate(),
            ProcessKind::MDependent { m, base } => {
                if *m > 64 {
                    return Err(LabError::Feasibility(format!(
                        "m-dependent window m = {m} too large; keep m <= 64"
                    )));
                }
                base.validate()
            }
        }
    }

    /// The exact stationary marginal law.
    pub fn marginal_dist(&self) -> MarginalDist {
        match &self.kind {
            ProcessKind::Iid(Marginal::Uniform { lo, hi }) => {
                MarginalDist::Uniform { lo: *lo, hi: *hi }
            }
            ProcessKind::Iid(Marginal::Normal { mean, sd }) => {
                MarginalDist::Normal { mean: *mean, sd: *sd }
            }
            ProcessKind::Ar1 { rho, innovation_sd } => MarginalDist::Normal {
                mean: 0.0,
                sd: innovation_sd / (1.0 - rho * rho).sqrt(),
            },
            ProcessKind::Markov(model) => MarginalDist::FiniteAtoms {
                atoms: model.states.clone(),
                masses: model.pi.clone(),
            },
            ProcessKind::MDependent { m, base } => match base {
                // A standardized sum of normals is exactly standard normal.
                Marginal::Normal { .. } => MarginalDist::Normal { mean: 0.0, sd: 1.0 },
                Marginal::Uniform { lo, hi } => MarginalDist::StandardizedUniformSum {
                    window: m + 1,
                    lo: *lo,
                    hi: *hi,
                },
            },
        }
    }

    pub fn is_iid(&self) -> bool {
        matches!(self.kind, ProcessKind::Iid(_))
    }
}

/// Exact stationary marginal CDF `F(x)` of a process.
pub fn marginal_cdf(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    Ok(spec.marginal_dist().cdf(x))
}

/// A realized path of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub values: Vec<f64>,
    pub spec_label: String,
    pub seed: u64,
    pub n: usize,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Samples a path on the default stream 0.
pub fn generate(spec: &ProcessSpec, n: usize, seed: u64) -> Result<SamplePath> {
    generate_stream(spec, n, seed, 0)
}

/// Samples a path on an explicit replication stream.
///
/// Every replication index gets its own counter-based stream, so replications
/// can be produced in any order (or in parallel) with identical results.
pub fn generate_stream(spec: &ProcessSpec, n: usize, seed: u64, stream: u64) -> Result<SamplePath> {
    spec.validate()?;
    if n == 0 {
        return Err(LabError::Validation("path length n must be >= 1".into()));
    }
    let mut rng = stream_rng(seed, stream);
    let mut values = Vec::with_capacity(n);
    match &spec.kind {
        ProcessKind::Iid(m) => {
            for _ in 0..n {
                values.push(m.quantile(next_unit_open(&mut rng)));
            }
        }
        ProcessKind::Ar1 { rho, innovation_sd } => {
            let stat_sd = innovation_sd / (1.0 - rho * rho).sqrt();
            let z0 = marginal::std_normal_quantile(next_unit_open(&mut rng));
            let mut x = stat_sd * z0;
            values.push(x);
            for _ in 1..n {
                let z = marginal::std_normal_quantile(next_unit_open(&mut rng));
                x = rho * x + innovation_sd * z;
                values.push(x);
            }
        }
        ProcessKind::Markov(model) => {
            let k = model.k();
            let mut state = sample_index(&model.pi, next_unit_open(&mut rng));
            values.push(model.states[state]);
            for _ in 1..n {
                let row = &model.p[state * k..(state + 1) * k];
                state = sample_index(row, next_unit_open(&mut rng));
                values.push(model.states[state]);
            }
        }
        ProcessKind::MDependent { m, base } => {
            let w = m + 1;
            let mu = base.mean();
            let sd = base.sd();
            let scale = sd * (w as f64).sqrt();
            let mut window: Vec<f64> = (0..w)
                .map(|_| base.quantile(next_unit_open(&mut rng)))
                .collect();
            let mut sum: f64 = window.iter().sum();
            let mut head = 0usize;
            values.push((sum - w as f64 * mu) / scale);
            for _ in 1..n {
                let fresh = base.quantile(next_unit_open(&mut rng));
                sum += fresh - window[head];
                window[head] = fresh;
                head = (head + 1) % w;
                values.push((sum - w as f64 * mu) / scale);
            }
        }
    }
    Ok(SamplePath {
        values,
        spec_label: spec.label.clone(),
        seed,
        n,
    })
}

/// First index whose cumulative weight exceeds `u`.
fn sample_index(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform01() -> ProcessSpec {
        ProcessSpec::new(
            ProcessKind::Iid(Marginal::Uniform { lo: 0.0, hi: 1.0 }),
            "iid-uniform",
        )
        .unwrap()
    }

    fn two_state_spec() -> ProcessSpec {
        let model =
            TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.7, 0.3], vec![0.2, 0.8]])
                .unwrap();
        ProcessSpec::new(ProcessKind::Markov(model), "two-state").unwrap()
    }

    #[test]
    fn iid_uniform_respects_support() {
        let path = generate(&uniform01(), 5, 42).unwrap();
        assert_eq!(path.len(), 5);
        assert!(path.values.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&two_state_spec(), 500, 1).unwrap();
        let b = generate(&two_state_spec(), 500, 1).unwrap();
        assert_eq!(a, b);
        let c = generate_stream(&two_state_spec(), 500, 1, 1).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn ar1_with_zero_rho_equals_iid_normal_draws() {
        let ar = ProcessSpec::new(
            ProcessKind::Ar1 { rho: 0.0, innovation_sd: 1.0 },
            "ar1-rho0",
        )
        .unwrap();
        let iid = ProcessSpec::new(
            ProcessKind::Iid(Marginal::Normal { mean: 0.0, sd: 1.0 }),
            "iid-normal",
        )
        .unwrap();
        let a = generate(&ar, 100, 7).unwrap();
        let b = generate(&iid, 100, 7).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        // Lag-1 autocorrelation of a longer path is near zero.
        let long = generate(&ar, 100_000, 7).unwrap().values;
        let mean = long.iter().sum::<f64>() / long.len() as f64;
        let var = long.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
        let cov: f64 = long
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum();
        assert!((cov / var).abs() < 0.01);
    }

    #[test]
    fn invalid_specs_fail_before_sampling() {
        let bad = ProcessSpec {
            kind: ProcessKind::Ar1 { rho: 1.0, innovation_sd: 1.0 },
            label: "bad".into(),
        };
        assert!(matches!(generate(&bad, 10, 0), Err(LabError::Validation(_))));
        let bad_m = ProcessSpec {
            kind: ProcessKind::Iid(Marginal::Uniform { lo: 1.0, hi: 0.0 }),
            label: "bad".into(),
        };
        assert!(bad_m.validate().is_err());
    }

    #[test]
    fn marginal_cdf_examples() {
        let markov = two_state_spec();
        assert_abs_diff_eq!(marginal_cdf(&markov, 0.5).unwrap(), 0.4, epsilon = 1e-12);
        let ar = ProcessSpec::new(
            ProcessKind::Ar1 { rho: 0.5, innovation_sd: 0.75f64.sqrt() },
            "ar1",
        )
        .unwrap();
        assert_abs_diff_eq!(marginal_cdf(&ar, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        // Stationary sd is innovation_sd / sqrt(1 - rho^2) = 1 here.
        assert_abs_diff_eq!(
            marginal_cdf(&ar, 1.0).unwrap(),
            Marginal::Normal { mean: 0.0, sd: 1.0 }.cdf(1.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            marginal_cdf(&uniform01(), 0.25).unwrap(),
            0.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn marginal_cdf_is_monotone_on_grids() {
        for spec in [
            uniform01(),
            two_state_spec(),
            ProcessSpec::new(
                ProcessKind::MDependent { m: 3, base: Marginal::Uniform { lo: 0.0, hi: 1.0 } },
                "mdep",
            )
            .unwrap(),
        ] {
            let d = spec.marginal_dist();
            let mut prev = -0.1;
            for i in -40..=40 {
                let v = d.cdf(i as f64 * 0.1);
                assert!(v >= prev, "cdf not monotone for {}", spec.label);
                prev = v;
            }
        }
    }

    #[test]
    fn markov_state_frequencies_approach_stationary_law() {
        // Chi-square distance to pi, averaged over a fixed stream family.
        let spec = two_state_spec();
        let chi2 = |n: usize| {
            (0..20)
                .map(|r| {
                    let path = generate_stream(&spec, n, 11, r).unwrap();
                    let f0 =
                        path.values.iter().filter(|&&x| x == 0.0).count() as f64 / n as f64;
                    let (p0, p1) = (0.4, 0.6);
                    (f0 - p0).powi(2) / p0 + ((1.0 - f0) - p1).powi(2) / p1
                })
                .sum::<f64>()
                / 20.0
        };
        assert!(chi2(100_000) < chi2(1_000));
    }

    #[test]
    fn m_dependent_path_is_standardized() {
        let spec = ProcessSpec::new(
            ProcessKind::MDependent { m: 2, base: Marginal::Uniform { lo: 0.0, hi: 1.0 } },
            "mdep",
        )
        .unwrap();
        let path = generate(&spec, 200_000, 3).unwrap();
        let mean = path.values.iter().sum::<f64>() / path.len() as f64;
        let var =
            path.values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / path.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }
}
