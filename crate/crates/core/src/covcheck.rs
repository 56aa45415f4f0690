//! Numerical certification of mixing covariance inequalities.
//!
//! On a finite chain, covariances, moment norms, and mixing coefficients are
//! all exact, so the classical bounds
//!
//! ```text
//!   |Cov(f(X_0), g(X_n))| <= 8 α(n)^{1/r} ||f||_p ||g||_q   (1/p + 1/q + 1/r = 1)
//!   |Cov(f(X_0), g(X_n))| <= 4 α(n) ||f||_∞ ||g||_∞
//!   |Cov(f(X_0), g(X_n))| <= 2 β(n) ||f||_∞ ||g||_∞
//! ```
//!
//! can be checked as machine-verifiable certificates: lhs, rhs, and slack,
//! with PASS meaning slack ≥ −1e-10 (the tolerance absorbs float noise on
//! analytically tight cases). Functions on states are per-state value vectors.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::mixing::{alpha_markov_exact, beta_markov_exact};
use crate::procgen::TransitionModel;
use crate::rng::stream_rng;

/// A certificate PASSes iff `slack >= -SLACK_TOL`.
pub const SLACK_TOL: f64 = 1e-10;

/// Hölder exponents with `1/p + 1/q + 1/r = 1` (use `f64::INFINITY` for ∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderTriple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl HolderTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let t = HolderTriple { p, q, r };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q), ("r", self.r)] {
            if !(v >= 1.0) {
                return Err(LabError::Validation(format!(
                    "Hoelder exponent {name} must be >= 1 (or infinity), got {v}"
                )));
            }
        }
        let inv = |v: f64| if v.is_infinite() { 0.0 } else { 1.0 / v };
        let total = inv(self.p) + inv(self.q) + inv(self.r);
        if (total - 1.0).abs() > 1e-12 {
            return Err(LabError::Validation(format!(
                "1/p + 1/q + 1/r must equal 1, got {total}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityId {
    /// `8 α^{1/r} ||f||_p ||g||_q`
    Alpha8,
    /// `4 α ||f||_∞ ||g||_∞`
    Alpha4Sup,
    /// `2 β ||f||_∞ ||g||_∞`
    Beta2Sup,
}

/// Evidence record for one inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub inputs_digest: String,
}

impl BoundCertificate {
    pub fn pass(&self) -> bool {
        self.slack >= -SLACK_TOL
    }
}

/// Exact lag covariance `Cov(f(X_0), g(X_lag))` under the stationary start.
///
/// Lag 0 uses the diagonal joint law.
pub fn cov_exact(model: &TransitionModel, f: &[f64], g: &[f64], lag: u32) -> Result<f64> {
    model.validate()?;
    check_state_fn(model, f, "f")?;
    check_state_fn(model, g, "g")?;
    let k = model.k();
    let mean_f: f64 = (0..k).map(|i| model.pi[i] * f[i]).sum();
    let mean_g: f64 = (0..k).map(|i| model.pi[i] * g[i]).sum();
    let joint = if lag == 0 {
        (0..k).map(|i| model.pi[i] * f[i] * g[i]).sum::<f64>()
    } else {
        let pn = model.transition_power(lag);
        let mut acc = 0.0;
        for i in 0..k {
            let mut row = 0.0;
            for j in 0..k {
                row += pn[i * k + j] * g[j];
            }
            acc += model.pi[i] * f[i] * row;
        }
        acc
    };
    Ok(joint - mean_f * mean_g)
}

/// Moment norm `||f||_p` under the stationary law; `p = ∞` takes the
/// essential sup (max over states with positive mass).
pub fn norm_p(model: &TransitionModel, f: &[f64], p: f64) -> Result<f64> {
    model.validate()?;
    check_state_fn(model, f, "f")?;
    if !(p >= 1.0) {
        return Err(LabError::Validation(format!(
            "norm order p must be >= 1 (or infinity), got {p}"
        )));
    }
    if p.is_infinite() {
        return Ok(f
            .iter()
            .zip(&model.pi)
            .filter(|(_, &m)| m > 0.0)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max));
    }
    let acc: f64 = f
        .iter()
        .zip(&model.pi)
        .map(|(v, m)| m * v.abs().powf(p))
        .sum();
    Ok(acc.powf(1.0 / p))
}

/// Certificate for `|Cov| <= 8 α^{1/r} ||f||_p ||g||_q`.
pub fn check_alpha_holder(
    model: &TransitionModel,
    f: &[f64],
    g: &[f64],
    lag: u32,
    triple: HolderTriple,
) -> Result<BoundCertificate> {
    triple.validate()?;
    let lhs = cov_exact(model, f, g, lag)?.abs();
    let alpha = alpha_markov_exact(model, lag)?;
    let alpha_pow = if triple.r.is_infinite() {
        1.0
    } else {
        alpha.powf(1.0 / triple.r)
    };
    let rhs = 8.0 * alpha_pow * norm_p(model, f, triple.p)? * norm_p(model, g, triple.q)?;
    Ok(certificate(
        InequalityId::Alpha8,
        lhs,
        rhs,
        model,
        f,
        g,
        lag,
        Some(triple),
    ))
}

/// Certificate for `|Cov| <= 4 α ||f||_∞ ||g||_∞`.
pub fn check_alpha_sup(
    model: &TransitionModel,
    f: &[f64],
    g: &[f64],
    lag: u32,
) -> Result<BoundCertificate> {
    let lhs = cov_exact(model, f, g, lag)?.abs();
    let alpha = alpha_markov_exact(model, lag)?;
    let rhs =
        4.0 * alpha * norm_p(model, f, f64::INFINITY)? * norm_p(model, g, f64::INFINITY)?;
    Ok(certificate(InequalityId::Alpha4Sup, lhs, rhs, model, f, g, lag, None))
}

/// Certificate for `|Cov| <= 2 β ||f||_∞ ||g||_∞`.
pub fn check_beta_sup(
    model: &TransitionModel,
    f: &[f64],
    g: &[f64],
    lag: u32,
) -> Result<BoundCertificate> {
    let lhs = cov_exact(model, f, g, lag)?.abs();
    let beta = beta_markov_exact(model, lag)?;
    let rhs = 2.0 * beta * norm_p(model, f, f64::INFINITY)? * norm_p(model, g, f64::INFINITY)?;
    Ok(certificate(InequalityId::Beta2Sup, lhs, rhs, model, f, g, lag, None))
}

fn check_state_fn(model: &TransitionModel, f: &[f64], name: &str) -> Result<()> {
    if f.len() != model.k() {
        return Err(LabError::Validation(format!(
            "{name} has {} entries for a {}-state model",
            f.len(),
            model.k()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Validation(format!("{name} has a non-finite entry")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn certificate(
    id: InequalityId,
    lhs: f64,
    rhs: f64,
    model: &TransitionModel,
    f: &[f64],
    g: &[f64],
    lag: u32,
    triple: Option<HolderTriple>,
) -> BoundCertificate {
    let mut hasher = Sha256::new();
    hasher.update(format!("{id:?}|lag={lag}|triple={triple:?}|"));
    for v in model.states.iter().chain(&model.p).chain(&model.pi) {
        hasher.update(v.to_bits().to_le_bytes());
    }
    hasher.update(b"|f|");
    for v in f {
        hasher.update(v.to_bits().to_le_bytes());
    }
    hasher.update(b"|g|");
    for v in g {
        hasher.update(v.to_bits().to_le_bytes());
    }
    let digest = hasher.finalize();
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    BoundCertificate {
        inequality_id: id,
        lhs,
        rhs,
        slack: rhs - lhs,
        inputs_digest: hex,
    }
}

/// One randomized sweep case: model, two bounded functions, a Hölder triple.
#[derive(Debug, Clone)]
pub struct SweepCase {
    pub model: TransitionModel,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub triple: HolderTriple,
}

/// Deterministic random model with `k` states and strictly positive rows.
pub fn random_model(k: usize, rng: &mut rand_chacha::ChaCha12Rng) -> Result<TransitionModel> {
    let mut states: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    states.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Nudge apart any near-duplicates so states stay strictly ascending.
    for i in 1..k {
        if states[i] - states[i - 1] < 1e-6 {
            states[i] = states[i - 1] + 1e-6;
        }
    }
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        })
        .collect();
    TransitionModel::from_matrix(states, &rows)
}

/// Random per-state values in `[-2, 2]`.
pub fn random_bounded_fn(k: usize, rng: &mut rand_chacha::ChaCha12Rng) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// Random valid Hölder triple via a point in the simplex.
pub fn random_holder_triple(rng: &mut rand_chacha::ChaCha12Rng) -> HolderTriple {
    loop {
        let a: f64 = rng.random_range(0.05..0.9);
        let b: f64 = rng.random_range(0.05..0.9);
        let c = 1.0 - a - b;
        if c > 0.05 {
            return HolderTriple { p: 1.0 / a, q: 1.0 / b, r: 1.0 / c };
        }
    }
}

/// Result of a randomized inequality sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cases: usize,
    pub certificates: usize,
    pub violations: usize,
    pub min_slack: f64,
}

/// Runs `cases` random models through all three inequality checks at every
/// lag, invoking `on_certificate` for each certificate produced.
pub fn inequality_sweep(
    cases: usize,
    k_range: (usize, usize),
    lags: &[u32],
    seed: u64,
    mut on_certificate: impl FnMut(&SweepCase, u32, &BoundCertificate),
) -> Result<SweepSummary> {
    if k_range.0 < 1 || k_range.0 > k_range.1 {
        return Err(LabError::Validation(format!(
            "bad state-count range {k_range:?}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut summary = SweepSummary {
        cases,
        certificates: 0,
        violations: 0,
        min_slack: f64::INFINITY,
    };
    for _ in 0..cases {
        let k = rng.random_range(k_range.0..=k_range.1);
        let case = SweepCase {
            model: random_model(k, &mut rng)?,
            f: random_bounded_fn(k, &mut rng),
            g: random_bounded_fn(k, &mut rng),
            triple: random_holder_triple(&mut rng),
        };
        for &lag in lags {
            for cert in [
                check_alpha_holder(&case.model, &case.f, &case.g, lag, case.triple)?,
                check_alpha_sup(&case.model, &case.f, &case.g, lag)?,
                check_beta_sup(&case.model, &case.f, &case.g, lag)?,
            ] {
                summary.certificates += 1;
                summary.min_slack = summary.min_slack.min(cert.slack);
                if !cert.pass() {
                    summary.violations += 1;
                }
                on_certificate(&case, lag, &cert);
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state() -> TransitionModel {
        TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn cov_examples() {
        let m = two_state();
        let ind = m.indicator_leq(0.5);
        assert_abs_diff_eq!(
            cov_exact(&m, &ind, &ind, 1).unwrap(),
            0.12,
            epsilon = 1e-12
        );
        // Constant functions are uncorrelated with anything.
        assert_abs_diff_eq!(
            cov_exact(&m, &[3.0, 3.0], &ind, 2).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let indep =
            TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.5, 0.5], vec![0.5, 0.5]])
                .unwrap();
        assert_abs_diff_eq!(
            cov_exact(&indep, &[1.0, -2.0], &[0.5, 4.0], 1).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        // Lag 0 is the plain variance for f = g.
        assert_abs_diff_eq!(
            cov_exact(&m, &ind, &ind, 0).unwrap(),
            0.24,
            epsilon = 1e-12
        );
    }

    #[test]
    fn norm_examples() {
        let m = two_state();
        let ind = m.indicator_leq(0.5); // mass 0.4 state
        assert_abs_diff_eq!(norm_p(&m, &ind, 2.0).unwrap(), 0.4f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(norm_p(&m, &[-1.5, -1.5], 7.0).unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(norm_p(&m, &[1.0, -2.0], 1.0).unwrap(), 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(
            norm_p(&m, &[1.0, -2.0], f64::INFINITY).unwrap(),
            2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn holder_triple_validation() {
        assert!(HolderTriple::new(4.0, 4.0, 2.0).is_ok());
        assert!(HolderTriple::new(f64::INFINITY, f64::INFINITY, 1.0).is_ok());
        assert!(HolderTriple::new(2.0, 2.0, 2.0).is_err());
        assert!(HolderTriple::new(0.5, 4.0, 2.0).is_err());
    }

    #[test]
    fn worked_alpha_holder_certificate() {
        let m = two_state();
        let ind = m.indicator_leq(0.5);
        let cert = check_alpha_holder(&m, &ind, &ind, 1, HolderTriple::new(4.0, 4.0, 2.0).unwrap())
            .unwrap();
        assert_abs_diff_eq!(cert.lhs, 0.12, epsilon = 1e-12);
        assert_abs_diff_eq!(
            cert.rhs,
            8.0 * 0.12f64.sqrt() * 0.4f64.powf(0.25) * 0.4f64.powf(0.25),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(cert.rhs, 1.7527121840165314, epsilon = 1e-10);
        assert!(cert.pass());
    }

    #[test]
    fn worked_sup_certificates() {
        let m = two_state();
        let ind = m.indicator_leq(0.5);
        let a = check_alpha_sup(&m, &ind, &ind, 1).unwrap();
        assert_abs_diff_eq!(a.rhs, 0.48, epsilon = 1e-12);
        assert!(a.pass());
        let b = check_beta_sup(&m, &ind, &ind, 1).unwrap();
        assert_abs_diff_eq!(b.rhs, 0.48, epsilon = 1e-12);
        assert!(b.pass());
    }

    #[test]
    fn independent_model_passes_with_zero_slack() {
        let indep =
            TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.5, 0.5], vec![0.5, 0.5]])
                .unwrap();
        let ind = indep.indicator_leq(0.5);
        let cert = check_beta_sup(&indep, &ind, &ind, 1).unwrap();
        assert_abs_diff_eq!(cert.lhs, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cert.rhs, 0.0, epsilon = 1e-14);
        assert!(cert.pass());
    }

    #[test]
    fn small_sweep_has_no_violations() {
        let summary = inequality_sweep(50, (2, 6), &[1, 2, 3], 99, |_, _, _| {}).unwrap();
        assert_eq!(summary.violations, 0);
        assert_eq!(summary.certificates, 50 * 3 * 3);
        assert!(summary.min_slack >= -SLACK_TOL);
    }

    #[test]
    fn digest_distinguishes_inputs() {
        let m = two_state();
        let ind = m.indicator_leq(0.5);
        let c1 = check_alpha_sup(&m, &ind, &ind, 1).unwrap();
        let c2 = check_alpha_sup(&m, &ind, &ind, 2).unwrap();
        assert_ne!(c1.inputs_digest, c2.inputs_digest);
        let c3 = check_alpha_sup(&m, &ind, &ind, 1).unwrap();
        assert_eq!(c1.inputs_digest, c3.inputs_digest);
    }

    #[test]
    fn time_reversal_symmetry_for_reversible_chains() {
        // The 2-state chain is reversible; Cov(f, g; lag) == Cov(g, f; lag).
        let m = two_state();
        let f = vec![1.0, -0.5];
        let g = vec![0.25, 2.0];
        for lag in [1, 2, 5] {
            assert_abs_diff_eq!(
                cov_exact(&m, &f, &g, lag).unwrap(),
                cov_exact(&m, &g, &f, lag).unwrap(),
                epsilon = 1e-12
            );
        }
    }
}
