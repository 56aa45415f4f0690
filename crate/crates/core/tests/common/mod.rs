//! Independent oracles for the integration suites.
//!
//! Everything here recomputes quantities from first principles (naive matrix
//! powers, full event-pair enumeration, dense grids, direct double sums) and
//! must stay independent of the library's computation paths.
#![allow(dead_code)] // each suite uses its own subset

use gclab_core::procgen::{ProcessKind, ProcessSpec, TransitionModel};

pub fn two_state_model() -> TransitionModel {
    TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap()
}

pub fn two_state_spec() -> ProcessSpec {
    ProcessSpec::new(ProcessKind::Markov(two_state_model()), "two-state-geometric").unwrap()
}

pub fn iid_uniform_spec() -> ProcessSpec {
    ProcessSpec::new(
        ProcessKind::Iid(gclab_core::procgen::Marginal::Uniform { lo: 0.0, hi: 1.0 }),
        "iid-uniform",
    )
    .unwrap()
}

/// `P^n` by plain sequential multiplication.
pub fn naive_power(k: usize, p: &[f64], n: u32) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        out[i * k + i] = 1.0;
    }
    for _ in 0..n {
        let mut next = vec![0.0; k * k];
        for i in 0..k {
            for l in 0..k {
                for j in 0..k {
                    next[i * k + j] += out[i * k + l] * p[l * k + j];
                }
            }
        }
        out = next;
    }
    out
}

/// Exact α by enumerating every pair of events (A, B).
pub fn alpha_bruteforce(model: &TransitionModel, n: u32) -> f64 {
    let k = model.k();
    let pn = naive_power(k, &model.p, n);
    let mut best = 0.0f64;
    for a in 0u32..(1 << k) {
        for b in 0u32..(1 << k) {
            let mut pa = 0.0;
            let mut pb = 0.0;
            let mut pab = 0.0;
            for i in 0..k {
                if a & (1 << i) == 0 {
                    continue;
                }
                pa += model.pi[i];
                for j in 0..k {
                    if b & (1 << j) != 0 {
                        pab += model.pi[i] * pn[i * k + j];
                    }
                }
            }
            for j in 0..k {
                if b & (1 << j) != 0 {
                    pb += model.pi[j];
                }
            }
            best = best.max((pab - pa * pb).abs());
        }
    }
    best
}

/// Exact β via the finest-partition double sum `½ ΣΣ |J_ij − π_i π_j|`.
pub fn beta_partition_form(model: &TransitionModel, n: u32) -> f64 {
    let k = model.k();
    let pn = naive_power(k, &model.p, n);
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            acc += (model.pi[i] * pn[i * k + j] - model.pi[i] * model.pi[j]).abs();
        }
    }
    0.5 * acc
}

/// Sup of |F_n − F| over a dense grid (two-pointer sweep).
pub fn dense_grid_sup(
    values: &[f64],
    cdf: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut idx = 0usize;
    let mut best = 0.0f64;
    for kpt in 0..points {
        let g = lo + (hi - lo) * kpt as f64 / (points - 1) as f64;
        while idx < sorted.len() && sorted[idx] <= g {
            idx += 1;
        }
        best = best.max((idx as f64 / n - cdf(g)).abs());
    }
    best
}

/// Variance of a sum of `len` stationary terms by the direct double sum
/// `Σ_i Σ_j Cov(|i−j|)` — no stationarity collapse.
pub fn var_sum_direct(var0: f64, cov: &dyn Fn(usize) -> f64, len: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..len {
        for j in 0..len {
            acc += if i == j { var0 } else { cov(i.abs_diff(j)) };
        }
    }
    acc
}
