//! Finite-state Markov chains: the exact-computation workhorse.
//!
//! A [`TransitionModel`] carries real-valued states in ascending order, a
//! row-stochastic transition matrix (stored flat, row-major), and the
//! stationary law. Matrix powers use repeated squaring and renormalize rows
//! when floating-point drift exceeds 1e-12.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const ROW_SUM_TOL: f64 = 1e-12;
pub const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    /// Distinct state values, ascending.
    pub states: Vec<f64>,
    /// Row-stochastic matrix, row-major, `k*k` entries.
    pub p: Vec<f64>,
    /// Stationary probability vector.
    pub pi: Vec<f64>,
}

impl TransitionModel {
    /// Builds a model from explicit `(states, P, pi)` and validates it.
    pub fn new(states: Vec<f64>, p: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        let model = TransitionModel { states, p, pi };
        model.validate()?;
        Ok(model)
    }

    /// Builds a model from `(states, P)`, solving for the stationary law.
    ///
    /// Uses the lazy-chain power iteration `π ← π(I + P)/2`, which converges
    /// for any irreducible chain including periodic ones.
    pub fn from_matrix(states: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let k = states.len();
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(LabError::Validation(format!(
                "transition matrix must be {k}x{k} to match {k} states"
            )));
        }
        let p: Vec<f64> = rows.iter().flatten().copied().collect();
        let pi = stationary_law(k, &p)?;
        TransitionModel::new(states, p, pi)
    }

    pub fn k(&self) -> usize {
        self.states.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(LabError::Validation("model needs at least one state".into()));
        }
        if self.p.len() != k * k {
            return Err(LabError::Validation(format!(
                "transition matrix has {} entries, expected {}",
                self.p.len(),
                k * k
            )));
        }
        if self.pi.len() != k {
            return Err(LabError::Validation(format!(
                "stationary vector has length {}, expected {k}",
                self.pi.len()
            )));
        }
        for w in self.states.windows(2) {
            if !(w[0] < w[1]) {
                return Err(LabError::Validation(
                    "states must be distinct and ascending".into(),
                ));
            }
        }
        for i in 0..k {
            let row = &self.p[i * k..(i + 1) * k];
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(LabError::Validation(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(LabError::Validation(format!(
                    "row {i} sums to {s}, off by more than {ROW_SUM_TOL}"
                )));
            }
        }
        let pi_sum: f64 = self.pi.iter().sum();
        if self.pi.iter().any(|&x| !(x >= 0.0)) || (pi_sum - 1.0).abs() > STATIONARY_TOL {
            return Err(LabError::Validation(format!(
                "stationary vector must be a probability vector (sum {pi_sum})"
            )));
        }
        for j in 0..k {
            let mut acc = 0.0;
            for i in 0..k {
                acc += self.pi[i] * self.p[i * k + j];
            }
            if (acc - self.pi[j]).abs() > STATIONARY_TOL {
                return Err(LabError::Validation(format!(
                    "pi is not stationary: (pi P)[{j}] = {acc} vs pi[{j}] = {}",
                    self.pi[j]
                )));
            }
        }
        Ok(())
    }

    /// `P^n` by repeated squaring, rows renormalized when drift shows up.
    pub fn transition_power(&self, n: u32) -> Vec<f64> {
        let k = self.k();
        let mut result = identity(k);
        let mut base = self.p.clone();
        let mut exp = n;
        while exp > 0 {
            if exp & 1 == 1 {
                result = mat_mul(k, &result, &base);
                renormalize_rows(k, &mut result);
            }
            exp >>= 1;
            if exp > 0 {
                base = mat_mul(k, &base, &base);
                renormalize_rows(k, &mut base);
            }
        }
        result
    }

    /// Stationary CDF: sum of `pi` over states ≤ x.
    pub fn cdf(&self, x: f64) -> f64 {
        self.states
            .iter()
            .zip(&self.pi)
            .take_while(|(s, _)| **s <= x)
            .map(|(_, m)| m)
            .sum()
    }

    /// Per-state values of the indicator `1{state ≤ x}`.
    pub fn indicator_leq(&self, x: f64) -> Vec<f64> {
        self.states
            .iter()
            .map(|&s| if s <= x { 1.0 } else { 0.0 })
            .collect()
    }
}

fn identity(k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] = 1.0;
    }
    m
}

pub(crate) fn mat_mul(k: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += ail * b[l * k + j];
            }
        }
    }
    out
}

fn renormalize_rows(k: usize, m: &mut [f64]) {
    for i in 0..k {
        let row = &mut m[i * k..(i + 1) * k];
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL && s > 0.0 {
            for x in row {
                *x /= s;
            }
        }
    }
}

/// Stationary law via damped power iteration.
fn stationary_law(k: usize, p: &[f64]) -> Result<Vec<f64>> {
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..200_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            let w = pi[i];
            for j in 0..k {
                next[j] += w * p[i * k + j];
            }
        }
        let mut delta = 0.0f64;
        for j in 0..k {
            next[j] = 0.5 * (next[j] + pi[j]);
            delta = delta.max((next[j] - pi[j]).abs());
        }
        pi = next;
        if delta < 1e-16 {
            break;
        }
    }
    let s: f64 = pi.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(LabError::Numeric(
            "stationary-law iteration diverged".into(),
        ));
    }
    for x in &mut pi {
        *x /= s;
    }
    Ok(pi)
}
