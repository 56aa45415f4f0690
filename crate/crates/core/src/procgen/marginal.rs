//! Marginal laws with exactly evaluable CDFs.
//!
//! Every process exposes its stationary marginal through [`MarginalDist`],
//! either a continuous family (uniform, Gaussian, standardized moving sums of
//! uniforms via the Irwin-Hall law) or a finite atom list for chains. The
//! sup-norm deviation code relies on `cdf` being exact, not approximated.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};

/// Base marginal for iid draws and m-dependent building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Marginal::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(LabError::Validation(format!(
                        "uniform marginal needs finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            Marginal::Normal { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
                    return Err(LabError::Validation(format!(
                        "normal marginal needs finite mean and sd > 0, got ({mean}, {sd})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Marginal::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
        }
    }

    /// Inverse CDF for `p ∈ (0, 1)`; drives all inverse-transform sampling.
    pub fn quantile(&self, p: f64) -> f64 {
        debug_assert!(p > 0.0 && p < 1.0);
        match *self {
            Marginal::Uniform { lo, hi } => lo + p * (hi - lo),
            Marginal::Normal { mean, sd } => mean + sd * std_normal_quantile(p),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => 0.5 * (lo + hi),
            Marginal::Normal { mean, .. } => mean,
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
            Marginal::Normal { sd, .. } => sd,
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal is well-defined")
}

pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// CDF of the sum of `n` iid standard uniforms (Irwin-Hall), clamped to [0,1].
///
/// Alternating-sum formula; fine for the window sizes used here (n ≤ ~30).
fn irwin_hall_cdf(x: f64, n: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= n as f64 {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut binom = 1.0; // C(n, k)
    let mut sign = 1.0;
    let kmax = x.floor() as usize;
    for k in 0..=kmax {
        acc += sign * binom * (x - k as f64).powi(n as i32);
        sign = -sign;
        binom *= (n - k) as f64 / (k + 1) as f64;
    }
    let mut fact = 1.0;
    for i in 2..=n {
        fact *= i as f64;
    }
    (acc / fact).clamp(0.0, 1.0)
}

/// Marginal law of a process, exposing an exact CDF.
///
/// `FiniteAtoms` covers chains; the sup-deviation routine needs the atoms and
/// their cumulative masses, not just a black-box CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalDist {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    /// Standardized sum of `window` iid `Uniform(lo, hi)` draws.
    StandardizedUniformSum { window: usize, lo: f64, hi: f64 },
    /// Atoms in ascending order with their probability masses.
    FiniteAtoms { atoms: Vec<f64>, masses: Vec<f64> },
}

impl MarginalDist {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MarginalDist::Uniform { lo, hi } => Marginal::Uniform { lo: *lo, hi: *hi }.cdf(x),
            MarginalDist::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            MarginalDist::StandardizedUniformSum { window, lo, hi } => {
                // X = (S − wμ)/(σ√w) with S the sum of w draws; reduce to the
                // standard Irwin-Hall variable S0 = (S − w·lo)/(hi − lo).
                let w = *window as f64;
                let mu = 0.5 * (lo + hi);
                let sd = (hi - lo) / 12f64.sqrt();
                let s = w * mu + x * sd * w.sqrt();
                irwin_hall_cdf((s - w * lo) / (hi - lo), *window)
            }
            MarginalDist::FiniteAtoms { atoms, masses } => {
                let mut acc = 0.0;
                for (a, m) in atoms.iter().zip(masses) {
                    if *a <= x {
                        acc += m;
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Atoms with cumulative mass, when the law is discrete.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            MarginalDist::FiniteAtoms { atoms, masses } => {
                let mut acc = 0.0;
                Some(
                    atoms
                        .iter()
                        .zip(masses)
                        .map(|(a, m)| {
                            acc += m;
                            (*a, acc)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, MarginalDist::FiniteAtoms { .. })
    }

    /// A closed interval that carries all but ~1e-12 of the mass.
    pub fn support_hull(&self) -> (f64, f64) {
        match self {
            MarginalDist::Uniform { lo, hi } => (*lo, *hi),
            MarginalDist::Normal { mean, sd } => (mean - 8.0 * sd, mean + 8.0 * sd),
            MarginalDist::StandardizedUniformSum { window, .. } => {
                let w = *window as f64;
                // |X| ≤ (w·(hi−lo)/2) / (σ√w) = √(3w)
                ((-3.0 * w).sqrt().max(-(3.0 * w).sqrt()), (3.0 * w).sqrt())
            }
            MarginalDist::FiniteAtoms { atoms, .. } => (
                *atoms.first().unwrap_or(&0.0),
                *atoms.last().unwrap_or(&0.0),
            ),
        }
    }
}
