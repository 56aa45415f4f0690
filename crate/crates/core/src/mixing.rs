//! Strong-mixing (α) and absolute-regularity (β) coefficients.
//!
//! For finite-state chains both coefficients are computed exactly between the
//! marginal σ-algebras of `X_0` and `X_n`. This is the standard Markov
//! reduction of the full past/future definition; outputs carry a metadata note
//! saying so (see [`MARKOV_REDUCTION_NOTE`]).
//!
//! α is the sup over event pairs `(A, B)` of `|P(X_0∈A, X_n∈B) − P(A)P(B)|`,
//! always in `[0, 1/4]`. β is the expected total-variation distance between
//! the lag-n transition rows and the stationary law, always in `[0, 1]`. The
//! per-event mixing modulus at a threshold x is estimated from sample paths
//! through the indicator series `1{X_t ≤ x}`.
//!
//! An alternative β definition floating around writes the plain sup over
//! single event pairs, which is exactly the α coefficient; we treat that form
//! as a typo for the total-variation one and report both values (they are
//! `alpha_markov_exact` and `beta_markov_exact`).

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fitting::{loglog_ols, ols};
use crate::procgen::{SamplePath, TransitionModel};

/// Reduction assumption recorded in every exact-coefficient output.
pub const MARKOV_REDUCTION_NOTE: &str =
    "coefficients computed between sigma(X_0) and sigma(X_n) (Markov reduction)";

/// Enumeration guard for the exact α sup over `2^k x 2^k` event pairs.
pub const ALPHA_EXACT_MAX_STATES: usize = 20;

/// Log-space RMSE below which a power-law fit counts as a good fit.
pub const FIT_RESIDUAL_TOL: f64 = 0.1;

/// Boundary slack when comparing a fitted exponent against a threshold.
const EXPONENT_BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Estimated { reps: u32, path_length: usize },
}

/// Least-squares decay fit `value ≈ C·n^{−a}` with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c: f64,
    pub a: f64,
    /// RMSE of the power-law fit in log space.
    pub residual: f64,
    /// Exact zeros excluded from the fit.
    pub dropped_zeros: usize,
    /// Set when an exponential model fits decisively better than any power
    /// law, i.e. the decay beats every polynomial rate.
    pub super_polynomial: bool,
}

/// A lag-indexed coefficient sequence with provenance and optional decay fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub kind: CoefficientKind,
    pub lags: Vec<u32>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub fit: Option<DecayFit>,
    pub note: String,
}

impl MixingProfile {
    pub fn new(
        kind: CoefficientKind,
        lags: Vec<u32>,
        values: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if lags.len() != values.len() {
            return Err(LabError::Validation(format!(
                "profile has {} lags but {} values",
                lags.len(),
                values.len()
            )));
        }
        if lags.is_empty() {
            return Err(LabError::Validation("profile must be nonempty".into()));
        }
        if lags.iter().any(|&l| l == 0) || lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Validation(
                "lags must be positive and strictly increasing".into(),
            ));
        }
        let cap = match kind {
            CoefficientKind::Alpha => 0.25,
            CoefficientKind::Beta => 1.0,
        };
        for (&l, &v) in lags.iter().zip(&values) {
            if !(v >= -1e-15 && v <= cap + 1e-12) {
                return Err(LabError::Validation(format!(
                    "{kind:?} coefficient {v} at lag {l} outside [0, {cap}]"
                )));
            }
        }
        Ok(MixingProfile {
            kind,
            lags,
            values,
            provenance,
            fit: None,
            note: String::new(),
        })
    }

    /// Exact α profile of a finite chain over the given lags.
    pub fn alpha_exact(model: &TransitionModel, lags: &[u32]) -> Result<Self> {
        let values = lags
            .iter()
            .map(|&n| alpha_markov_exact(model, n))
            .collect::<Result<Vec<_>>>()?;
        let mut p = MixingProfile::new(
            CoefficientKind::Alpha,
            lags.to_vec(),
            values,
            Provenance::Exact,
        )?;
        p.note = MARKOV_REDUCTION_NOTE.to_string();
        Ok(p)
    }

    /// Exact β profile of a finite chain over the given lags.
    pub fn beta_exact(model: &TransitionModel, lags: &[u32]) -> Result<Self> {
        let values = lags
            .iter()
            .map(|&n| beta_markov_exact(model, n))
            .collect::<Result<Vec<_>>>()?;
        let mut p = MixingProfile::new(
            CoefficientKind::Beta,
            lags.to_vec(),
            values,
            Provenance::Exact,
        )?;
        p.note = MARKOV_REDUCTION_NOTE.to_string();
        Ok(p)
    }

    /// Attaches a decay fit computed by [`fit_decay`].
    pub fn with_fit(mut self) -> Result<Self> {
        self.fit = Some(fit_decay(&self)?);
        Ok(self)
    }

    /// CSV body `lag,value,provenance`, one row per lag.
    pub fn to_csv(&self) -> String {
        let prov = match &self.provenance {
            Provenance::Exact => "exact".to_string(),
            Provenance::Estimated { reps, path_length } => {
                format!("estimated(reps={reps};path_length={path_length})")
            }
        };
        let mut out = String::from("lag,value,provenance\n");
        for (l, v) in self.lags.iter().zip(&self.values) {
            out.push_str(&format!("{l},{v},{prov}\n"));
        }
        out
    }
}

/// Polynomial decay threshold `(1+δ)/(1−δ)` for δ in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateThreshold {
    pub delta: f64,
    pub exponent: f64,
}

impl RateThreshold {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LabError::Validation(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(RateThreshold {
            delta,
            exponent: (1.0 + delta) / (1.0 - delta),
        })
    }
}

/// Exact strong-mixing coefficient `α(n)` of a finite chain.
///
/// Sup over all event pairs `A, B ⊆ states` of
/// `|P(X_0∈A, X_n∈B) − P(X_0∈A)P(X_n∈B)|` under the stationary start. Only
/// one side is enumerated: for fixed A the optimal B keeps the columns with
/// positive signed mass, so the sup is `max_A Σ_j max(0, Σ_{i∈A} D_ij)` with
/// `D_ij = π_i((P^n)_ij − π_j)`.
pub fn alpha_markov_exact(model: &TransitionModel, n: u32) -> Result<f64> {
    model.validate()?;
    if n == 0 {
        return Err(LabError::Validation("lag n must be >= 1".into()));
    }
    let k = model.k();
    if k > ALPHA_EXACT_MAX_STATES {
        return Err(LabError::Feasibility(format!(
            "exact alpha enumerates 2^k event sets; k = {k} exceeds {ALPHA_EXACT_MAX_STATES} \
             (use beta_markov_exact or estimate from paths)"
        )));
    }
    let pn = model.transition_power(n);
    let mut d = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            d[i * k + j] = model.pi[i] * (pn[i * k + j] - model.pi[j]);
        }
    }
    // Gray-code walk over subsets A; colsum updated one row per step and
    // refreshed periodically to cap floating-point drift.
    let mut colsum = vec![0.0; k];
    let mut best = 0.0f64;
    let mut gray_prev = 0u64;
    for step in 1u64..(1u64 << k) {
        let gray = step ^ (step >> 1);
        let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
        let sign = if gray & (1 << flipped) != 0 { 1.0 } else { -1.0 };
        for j in 0..k {
            colsum[j] += sign * d[flipped * k + j];
        }
        if step % 1024 == 0 {
            for j in 0..k {
                colsum[j] = (0..k)
                    .filter(|i| gray & (1 << i) != 0)
                    .map(|i| d[i * k + j])
                    .sum();
            }
        }
        let pos: f64 = colsum.iter().map(|&c| c.max(0.0)).sum();
        best = best.max(pos);
        gray_prev = gray;
    }
    Ok(best.clamp(0.0, 0.25))
}

/// Exact absolute-regularity coefficient `β(n)` of a finite chain.
///
/// `Σ_i π_i · ½ Σ_j |(P^n)_ij − π_j|`: the π-average of the total-variation
/// distance between the lag-n rows and the stationary law. Equals the sup of
/// `½ ΣΣ |P(A_i∩B_j) − P(A_i)P(B_j)|` over finite partitions, attained at the
/// finest one.
pub fn beta_markov_exact(model: &TransitionModel, n: u32) -> Result<f64> {
    model.validate()?;
    if n == 0 {
        return Err(LabError::Validation("lag n must be >= 1".into()));
    }
    let k = model.k();
    let pn = model.transition_power(n);
    let mut acc = 0.0;
    for i in 0..k {
        let tv: f64 = (0..k).map(|j| (pn[i * k + j] - model.pi[j]).abs()).sum();
        acc += model.pi[i] * 0.5 * tv;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Estimated per-event mixing modulus at threshold `x` and lag `n`.
///
/// The σ-algebras generated by the binary events `{X_t ≤ x}` admit only four
/// event pairs, all with the same covariance magnitude, so the sup reduces to
/// the absolute lag-n autocovariance of the indicator series.
pub fn alpha_modulus_estimate(path: &SamplePath, x: f64, n: u32) -> Result<f64> {
    let lag = n as usize;
    if lag == 0 {
        return Err(LabError::Validation("lag n must be >= 1".into()));
    }
    if path.len() <= lag + 30 {
        return Err(LabError::InsufficientData(format!(
            "need path length > lag + 30 = {}, got {}",
            lag + 30,
            path.len()
        )));
    }
    let ind: Vec<f64> = path
        .values
        .iter()
        .map(|&v| if v <= x { 1.0 } else { 0.0 })
        .collect();
    let mean = ind.iter().sum::<f64>() / ind.len() as f64;
    let pairs = ind.len() - lag;
    let cross: f64 = (0..pairs).map(|t| ind[t] * ind[t + lag]).sum::<f64>() / pairs as f64;
    Ok((cross - mean * mean).abs())
}

/// Averaged modulus profile over independent replications.
pub fn estimate_alpha_modulus_profile(
    spec: &crate::procgen::ProcessSpec,
    x: f64,
    lags: &[u32],
    reps: u32,
    path_length: usize,
    seed: u64,
) -> Result<MixingProfile> {
    if reps == 0 {
        return Err(LabError::Validation("reps must be >= 1".into()));
    }
    let mut sums = vec![0.0; lags.len()];
    for r in 0..reps {
        let path = crate::procgen::generate_stream(spec, path_length, seed, r as u64)?;
        for (idx, &lag) in lags.iter().enumerate() {
            sums[idx] += alpha_modulus_estimate(&path, x, lag)?;
        }
    }
    let values: Vec<f64> = sums.iter().map(|s| s / reps as f64).collect();
    let mut p = MixingProfile::new(
        CoefficientKind::Alpha,
        lags.to_vec(),
        values,
        Provenance::Estimated { reps, path_length },
    )?;
    p.note = format!("indicator-event modulus at x = {x}");
    Ok(p)
}

/// Fits `value ≈ C·n^{−a}` to the strictly positive profile entries.
///
/// Also fits `value ≈ C·ρ^n`; when the exponential model is decisively better
/// the profile decays faster than any polynomial and the fit is flagged
/// `super_polynomial`.
pub fn fit_decay(profile: &MixingProfile) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0usize;
    for (&l, &v) in profile.lags.iter().zip(&profile.values) {
        if v > 0.0 {
            xs.push(l as f64);
            ys.push(v);
        } else {
            dropped += 1;
        }
    }
    if xs.len() < 3 {
        return Err(LabError::FitUndefined(format!(
            "need >= 3 strictly positive values, got {}",
            xs.len()
        )));
    }
    let power = loglog_ols(&xs, &ys)?;
    let log_y: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let expo = ols(&xs, &log_y)?;
    let super_polynomial =
        expo.rmse < FIT_RESIDUAL_TOL && power.rmse > FIT_RESIDUAL_TOL && expo.slope < 0.0;
    Ok(DecayFit {
        c: power.intercept.exp(),
        a: -power.slope,
        residual: power.rmse,
        dropped_zeros: dropped,
        super_polynomial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ThresholdVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for ThresholdVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdVerdict::Satisfied => write!(f, "SATISFIED"),
            ThresholdVerdict::Violated => write!(f, "VIOLATED"),
            ThresholdVerdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

/// Checks a profile against the decay threshold `n^{−(1+δ)/(1−δ)}`.
///
/// SATISFIED when the coefficients vanish beyond some lag, when the decay is
/// super-polynomial, or when a good power-law fit has exponent at or above
/// the threshold. VIOLATED when a good fit falls short. INCONCLUSIVE when the
/// fit is too poor to decide.
pub fn threshold_check(profile: &MixingProfile, delta: f64) -> Result<ThresholdVerdict> {
    let threshold = RateThreshold::new(delta)?;
    if profile.values.is_empty() {
        return Err(LabError::Validation("profile must be nonempty".into()));
    }
    // Exactly zero beyond some lag beats any polynomial rate.
    if *profile.values.last().unwrap() == 0.0 {
        let first_zero_tail = profile
            .values
            .iter()
            .rposition(|&v| v != 0.0)
            .map_or(0, |i| i + 1);
        if profile.values[first_zero_tail..].iter().all(|&v| v == 0.0) {
            return Ok(ThresholdVerdict::Satisfied);
        }
    }
    let fit = match fit_decay(profile) {
        Ok(f) => f,
        Err(LabError::FitUndefined(_)) => return Ok(ThresholdVerdict::Inconclusive),
        Err(e) => return Err(e),
    };
    if fit.super_polynomial {
        return Ok(ThresholdVerdict::Satisfied);
    }
    if fit.residual <= FIT_RESIDUAL_TOL {
        if fit.a + EXPONENT_BOUNDARY_TOL >= threshold.exponent {
            Ok(ThresholdVerdict::Satisfied)
        } else {
            Ok(ThresholdVerdict::Violated)
        }
    } else {
        Ok(ThresholdVerdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procgen::{Marginal, ProcessKind, ProcessSpec};
    use approx::assert_abs_diff_eq;

    fn two_state() -> TransitionModel {
        TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn alpha_of_two_state_chain_matches_closed_form() {
        let m = two_state();
        // pi0*pi1*|lambda|^n with lambda = 1 - 0.3 - 0.2 = 0.5.
        assert_abs_diff_eq!(alpha_markov_exact(&m, 1).unwrap(), 0.12, epsilon = 1e-12);
        assert_abs_diff_eq!(alpha_markov_exact(&m, 3).unwrap(), 0.03, epsilon = 1e-12);
    }

    #[test]
    fn beta_of_two_state_chain_matches_closed_form() {
        let m = two_state();
        assert_abs_diff_eq!(beta_markov_exact(&m, 1).unwrap(), 0.24, epsilon = 1e-12);
        assert_abs_diff_eq!(
            beta_markov_exact(&m, 4).unwrap(),
            0.48 * 0.5f64.powi(4),
            epsilon = 1e-12
        );
    }

    #[test]
    fn identical_rows_mean_independence() {
        let m =
            TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.5, 0.5], vec![0.5, 0.5]])
                .unwrap();
        for n in [1, 2, 7] {
            assert_abs_diff_eq!(alpha_markov_exact(&m, n).unwrap(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(beta_markov_exact(&m, n).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn alpha_feasibility_guard_kicks_in() {
        let k = 21;
        let states: Vec<f64> = (0..k).map(|i| i as f64).collect();
        let rows: Vec<Vec<f64>> = (0..k).map(|_| vec![1.0 / k as f64; k]).collect();
        let m = TransitionModel::from_matrix(states, &rows).unwrap();
        assert!(matches!(
            alpha_markov_exact(&m, 1),
            Err(LabError::Feasibility(_))
        ));
        // beta stays available.
        assert!(beta_markov_exact(&m, 1).is_ok());
    }

    #[test]
    fn modulus_estimate_vanishes_for_iid_and_constant_paths() {
        let iid = ProcessSpec::new(
            ProcessKind::Iid(Marginal::Uniform { lo: 0.0, hi: 1.0 }),
            "iid",
        )
        .unwrap();
        let path = crate::procgen::generate(&iid, 200_000, 5).unwrap();
        assert!(alpha_modulus_estimate(&path, 0.5, 1).unwrap() < 0.003);

        let constant = SamplePath {
            values: vec![1.0; 100],
            spec_label: "const".into(),
            seed: 0,
            n: 100,
        };
        assert_eq!(alpha_modulus_estimate(&constant, 0.5, 1).unwrap(), 0.0);
        assert_eq!(alpha_modulus_estimate(&constant, 2.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn modulus_estimate_requires_overlap() {
        let short = SamplePath {
            values: vec![0.0; 40],
            spec_label: "short".into(),
            seed: 0,
            n: 40,
        };
        assert!(matches!(
            alpha_modulus_estimate(&short, 0.5, 10),
            Err(LabError::InsufficientData(_))
        ));
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let lags: Vec<u32> = (1..=10).collect();
        let values: Vec<f64> = lags.iter().map(|&n| 0.2 * (n as f64).powf(-1.5)).collect();
        let p = MixingProfile::new(CoefficientKind::Alpha, lags, values, Provenance::Exact)
            .unwrap();
        let fit = fit_decay(&p).unwrap();
        assert_abs_diff_eq!(fit.a, 1.5, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.c, 0.2, epsilon = 1e-9);
        assert!(!fit.super_polynomial);
    }

    #[test]
    fn geometric_profile_is_flagged_super_polynomial() {
        let lags: Vec<u32> = (1..=10).collect();
        let values: Vec<f64> = lags.iter().map(|&n| 0.48 * 0.5f64.powi(n as i32)).collect();
        let p = MixingProfile::new(CoefficientKind::Beta, lags, values, Provenance::Exact)
            .unwrap();
        let fit = fit_decay(&p).unwrap();
        assert!(fit.super_polynomial);
    }

    #[test]
    fn all_zero_profile_has_no_fit_but_satisfies_thresholds() {
        let p = MixingProfile::new(
            CoefficientKind::Alpha,
            vec![3, 4, 5],
            vec![0.0, 0.0, 0.0],
            Provenance::Exact,
        )
        .unwrap();
        assert!(matches!(fit_decay(&p), Err(LabError::FitUndefined(_))));
        assert_eq!(
            threshold_check(&p, 0.9).unwrap(),
            ThresholdVerdict::Satisfied
        );
    }

    #[test]
    fn threshold_examples() {
        assert_abs_diff_eq!(RateThreshold::new(0.5).unwrap().exponent, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            RateThreshold::new(1.0 / 3.0).unwrap().exponent,
            2.0,
            epsilon = 1e-12
        );
        assert!(RateThreshold::new(0.0).is_err());
        assert!(RateThreshold::new(1.0).is_err());

        let lags: Vec<u32> = (1..=10).collect();
        let poly2: Vec<f64> = lags.iter().map(|&n| (n as f64).powi(-2)).collect();
        let p = MixingProfile::new(CoefficientKind::Beta, lags, poly2, Provenance::Exact)
            .unwrap();
        assert_eq!(threshold_check(&p, 0.5).unwrap(), ThresholdVerdict::Violated);
        assert_eq!(
            threshold_check(&p, 1.0 / 3.0).unwrap(),
            ThresholdVerdict::Satisfied
        );
    }

    #[test]
    fn estimated_modulus_profile_tracks_the_exact_coefficients() {
        let model = two_state();
        let spec = ProcessSpec::new(ProcessKind::Markov(model.clone()), "chain").unwrap();
        let lags = [1u32, 2, 3];
        let profile =
            estimate_alpha_modulus_profile(&spec, 0.5, &lags, 8, 40_000, 77).unwrap();
        assert!(matches!(
            profile.provenance,
            Provenance::Estimated { reps: 8, path_length: 40_000 }
        ));
        for (&lag, &est) in profile.lags.iter().zip(&profile.values) {
            let exact = alpha_markov_exact(&model, lag).unwrap();
            assert!(
                (est - exact).abs() < 0.02,
                "lag {lag}: estimate {est} vs exact {exact}"
            );
        }
    }

    #[test]
    fn profile_validation_rejects_out_of_range_values() {
        assert!(MixingProfile::new(
            CoefficientKind::Alpha,
            vec![1, 2],
            vec![0.3, 0.1],
            Provenance::Exact
        )
        .is_err());
        assert!(MixingProfile::new(
            CoefficientKind::Beta,
            vec![2, 1],
            vec![0.1, 0.1],
            Provenance::Exact
        )
        .is_err());
    }

    #[test]
    fn csv_round_trips_the_numbers() {
        let m = two_state();
        let p = MixingProfile::beta_exact(&m, &[1, 2, 3]).unwrap();
        let csv = p.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "lag,value,provenance");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "1");
        assert_eq!(row[1].parse::<f64>().unwrap(), p.values[0]);
    }
}
