//! Empirical measures and exact sup-norm CDF deviations.
//!
//! The sup `sup_x |F_n(x) − F(x)|` is computed exactly, not on a grid: for
//! continuous F it is attained at an order statistic (from above or from the
//! left limit below), for discrete F at an atom or an atom's left limit.
//! Convergence studies replicate paths on per-replication streams, so the
//! sequential and parallel runners produce bit-identical matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fitting::{loglog_ols, LinearFit};
use crate::procgen::{generate_stream, MarginalDist, ProcessSpec, SamplePath};

/// Empirical CDF of a path: right-continuous step function with steps 1/n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    pub sorted_values: Vec<f64>,
    pub n: usize,
}

impl Ecdf {
    pub fn from_path(path: &SamplePath) -> Result<Self> {
        if path.is_empty() {
            return Err(LabError::Validation("empty path has no ecdf".into()));
        }
        if path.values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Numeric("path contains non-finite values".into()));
        }
        let mut sorted = path.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Ecdf {
            n: sorted.len(),
            sorted_values: sorted,
        })
    }

    /// `F_n(x)`: fraction of observations ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.sorted_values.partition_point(|&v| v <= x);
        count as f64 / self.n as f64
    }

    /// `F_n(x⁻)`: fraction of observations strictly below x.
    pub fn eval_left(&self, x: f64) -> f64 {
        let count = self.sorted_values.partition_point(|&v| v < x);
        count as f64 / self.n as f64
    }
}

/// Empirical mean `(1/n) Σ f(X_i)`; linear in f.
pub fn pn_f(path: &SamplePath, f: impl Fn(f64) -> f64) -> Result<f64> {
    if path.is_empty() {
        return Err(LabError::Validation("empty path".into()));
    }
    Ok(path.values.iter().map(|&v| f(v)).sum::<f64>() / path.len() as f64)
}

/// Exact sup-norm deviation `sup_x |F_n(x) − F(x)|`.
pub fn ecdf_sup_deviation(path: &SamplePath, marginal: &MarginalDist) -> Result<f64> {
    let ecdf = Ecdf::from_path(path)?;
    let sup = match marginal.atoms() {
        Some(atoms) => {
            // Both F_n and F are flat off the atoms, so the sup is attained at
            // an atom or its left limit.
            let mut best = 0.0f64;
            let mut prev_cum = 0.0;
            for &(a, cum) in &atoms {
                best = best.max((ecdf.eval(a) - cum).abs());
                best = best.max((ecdf.eval_left(a) - prev_cum).abs());
                prev_cum = cum;
            }
            best
        }
        None => {
            // Continuous F: compare i/n from above and (i-1)/n from below at
            // each order statistic.
            let n = ecdf.n as f64;
            let mut best = 0.0f64;
            for (i, &x) in ecdf.sorted_values.iter().enumerate() {
                let fx = marginal.cdf(x);
                best = best.max((i + 1) as f64 / n - fx);
                best = best.max(fx - i as f64 / n);
            }
            best
        }
    };
    Ok(sup.clamp(0.0, 1.0))
}

/// Per-n summary of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub q10: f64,
    pub q90: f64,
}

/// Sup-norm deviations over an (n, replication) grid with a decay fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub spec_label: String,
    pub iid: bool,
    pub n_grid: Vec<usize>,
    pub reps: u32,
    pub seed: u64,
    /// `deviations[j][r]`: replication r at length `n_grid[j]`.
    pub deviations: Vec<Vec<f64>>,
    pub summary: Vec<DeviationSummary>,
    /// Fit of mean deviation ≈ C·n^{−b}; `slope = −b`.
    pub fit: LinearFit,
    /// The fit applies to the mean; the underlying statement is almost-sure.
    pub note: String,
}

impl ConvergenceStudy {
    /// CSV body `n,rep,deviation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,rep,deviation\n");
        for (j, &n) in self.n_grid.iter().enumerate() {
            for (r, d) in self.deviations[j].iter().enumerate() {
                out.push_str(&format!("{n},{r},{d}\n"));
            }
        }
        out
    }

    /// CSV body `n,mean,q10,q90` for plotting.
    pub fn to_plot_csv(&self) -> String {
        let mut out = String::from("n,mean,q10,q90\n");
        for s in &self.summary {
            out.push_str(&format!("{},{},{},{}\n", s.n, s.mean, s.q10, s.q90));
        }
        out
    }

    /// Decay exponent b in mean ≈ C·n^{−b}.
    pub fn decay_exponent(&self) -> f64 {
        -self.fit.slope
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    // Linear interpolation between order statistics (type-7).
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn study_from_matrix(
    spec: &ProcessSpec,
    n_grid: &[usize],
    reps: u32,
    seed: u64,
    per_rep: Vec<Vec<f64>>,
) -> Result<ConvergenceStudy> {
    // per_rep[r][j] -> deviations[j][r]
    let deviations: Vec<Vec<f64>> = (0..n_grid.len())
        .map(|j| per_rep.iter().map(|row| row[j]).collect())
        .collect();
    let mut summary = Vec::with_capacity(n_grid.len());
    for (j, &n) in n_grid.iter().enumerate() {
        let mut sorted = deviations[j].clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        summary.push(DeviationSummary {
            n,
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            median: quantile(&sorted, 0.5),
            max: *sorted.last().unwrap(),
            q10: quantile(&sorted, 0.1),
            q90: quantile(&sorted, 0.9),
        });
    }
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = summary.iter().map(|s| s.mean).collect();
    let fit = loglog_ols(&ns, &means)?;
    Ok(ConvergenceStudy {
        spec_label: spec.label.clone(),
        iid: spec.is_iid(),
        n_grid: n_grid.to_vec(),
        reps,
        seed,
        deviations,
        summary,
        fit,
        note: "mean-deviation decay; per-replication streams derived from (seed, rep)".into(),
    })
}

fn validate_study_args(spec: &ProcessSpec, n_grid: &[usize], reps: u32) -> Result<()> {
    spec.validate()?;
    if reps == 0 {
        return Err(LabError::Validation("reps must be >= 1".into()));
    }
    if n_grid.is_empty() || n_grid.iter().any(|&n| n == 0) {
        return Err(LabError::Validation("n_grid must be nonempty and positive".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Validation("n_grid must be strictly ascending".into()));
    }
    Ok(())
}

/// One replication: deviations of nested prefixes of a single path.
fn replication_row(
    spec: &ProcessSpec,
    marginal: &MarginalDist,
    n_grid: &[usize],
    seed: u64,
    rep: u64,
) -> Result<Vec<f64>> {
    let n_max = *n_grid.last().unwrap();
    let path = generate_stream(spec, n_max, seed, rep)?;
    n_grid
        .iter()
        .map(|&n| {
            let prefix = SamplePath {
                values: path.values[..n].to_vec(),
                spec_label: path.spec_label.clone(),
                seed,
                n,
            };
            ecdf_sup_deviation(&prefix, marginal)
        })
        .collect()
}

/// Sequential convergence study.
pub fn convergence_study(
    spec: &ProcessSpec,
    n_grid: &[usize],
    reps: u32,
    seed: u64,
) -> Result<ConvergenceStudy> {
    validate_study_args(spec, n_grid, reps)?;
    let marginal = spec.marginal_dist();
    let per_rep = (0..reps as u64)
        .map(|r| replication_row(spec, &marginal, n_grid, seed, r))
        .collect::<Result<Vec<_>>>()?;
    study_from_matrix(spec, n_grid, reps, seed, per_rep)
}

/// Parallel convergence study; identical output to the sequential runner.
pub fn convergence_study_parallel(
    spec: &ProcessSpec,
    n_grid: &[usize],
    reps: u32,
    seed: u64,
) -> Result<ConvergenceStudy> {
    validate_study_args(spec, n_grid, reps)?;
    let marginal = spec.marginal_dist();
    let per_rep = (0..reps as u64)
        .into_par_iter()
        .map(|r| replication_row(spec, &marginal, n_grid, seed, r))
        .collect::<Result<Vec<_>>>()?;
    study_from_matrix(spec, n_grid, reps, seed, per_rep)
}

/// One `(n, ε)` row of the iid concentration check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkwRow {
    pub n: usize,
    pub epsilon: f64,
    /// `min(1, 2·exp(−2nε²))`.
    pub bound: f64,
    pub observed_frequency: f64,
    pub standard_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkwReport {
    pub rows: Vec<DkwRow>,
    pub pass: bool,
}

/// Checks the iid tail bound `P(D_n > ε) ≤ 2·exp(−2nε²)` against observed
/// exceedance frequencies, with a 3-standard-error allowance.
///
/// The bound is iid-specific, so non-iid studies are rejected.
pub fn dkw_tail_check(study: &ConvergenceStudy) -> Result<DkwReport> {
    if !study.iid {
        return Err(LabError::Validation(format!(
            "the concentration bound applies to iid samples only; study '{}' is not iid",
            study.spec_label
        )));
    }
    let mut rows = Vec::new();
    for (j, &n) in study.n_grid.iter().enumerate() {
        for &eps in &[0.05, 0.1] {
            let bound = (2.0 * (-2.0 * n as f64 * eps * eps).exp()).min(1.0);
            let reps = study.deviations[j].len() as f64;
            let exceed = study.deviations[j].iter().filter(|&&d| d > eps).count() as f64;
            let freq = exceed / reps;
            let se = (freq * (1.0 - freq) / reps).sqrt();
            rows.push(DkwRow {
                n,
                epsilon: eps,
                bound,
                observed_frequency: freq,
                standard_error: se,
                pass: freq <= bound + 3.0 * se,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(DkwReport { rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procgen::{Marginal, ProcessKind, TransitionModel};
    use approx::assert_abs_diff_eq;

    fn uniform_spec() -> ProcessSpec {
        ProcessSpec::new(
            ProcessKind::Iid(Marginal::Uniform { lo: 0.0, hi: 1.0 }),
            "iid-uniform",
        )
        .unwrap()
    }

    fn path_of(values: &[f64]) -> SamplePath {
        SamplePath {
            values: values.to_vec(),
            spec_label: "manual".into(),
            seed: 0,
            n: values.len(),
        }
    }

    #[test]
    fn pn_f_basics() {
        let p = path_of(&[1.0, 2.0, 3.0]);
        assert_eq!(pn_f(&p, |_| 1.0).unwrap(), 1.0);
        assert_eq!(pn_f(&p, |x| x).unwrap(), 2.0);
    }

    #[test]
    fn pn_f_is_linear() {
        let p = path_of(&[0.3, -1.2, 4.0, 0.0, 2.5]);
        let f = |x: f64| x * x;
        let g = |x: f64| (x + 1.0).abs();
        let (a, b) = (1.7, -0.6);
        let lhs = pn_f(&p, |x| a * f(x) + b * g(x)).unwrap();
        let rhs = a * pn_f(&p, f).unwrap() + b * pn_f(&p, g).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn worked_sup_deviation_example() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let d = ecdf_sup_deviation(&path_of(&[0.2, 0.5, 0.9]), &marginal).unwrap();
        // Attained just below 0.9: F = 0.9, F_n = 2/3.
        assert_abs_diff_eq!(d, 0.9 - 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d, 0.2333333333333333, epsilon = 1e-9);
    }

    #[test]
    fn single_point_at_median_gives_half() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let d = ecdf_sup_deviation(&path_of(&[0.5]), &marginal).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn quantile_spaced_path_gives_half_over_n() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let n = 8;
        let values: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let d = ecdf_sup_deviation(&path_of(&values), &marginal).unwrap();
        assert_abs_diff_eq!(d, 0.5 / n as f64, epsilon = 1e-15);
    }

    #[test]
    fn discrete_sup_checks_atoms_and_left_limits() {
        let marginal = MarginalDist::FiniteAtoms {
            atoms: vec![0.0, 1.0],
            masses: vec![0.4, 0.6],
        };
        // Path (0,1,1,1): F_n(0)=0.25 vs 0.4; F_n(1)=1 vs 1; left limits:
        // F_n(0-)=0 vs 0, F_n(1-)=0.25 vs 0.4. Sup = 0.15.
        let d = ecdf_sup_deviation(&path_of(&[0.0, 1.0, 1.0, 1.0]), &marginal).unwrap();
        assert_abs_diff_eq!(d, 0.15, epsilon = 1e-15);
    }

    #[test]
    fn constant_process_has_zero_deviation() {
        let model = TransitionModel::from_matrix(vec![2.5], &[vec![1.0]]).unwrap();
        let spec = ProcessSpec::new(ProcessKind::Markov(model), "const").unwrap();
        let marginal = spec.marginal_dist();
        for n in [1usize, 5, 50] {
            let path = generate_stream(&spec, n, 3, 0).unwrap();
            assert_eq!(ecdf_sup_deviation(&path, &marginal).unwrap(), 0.0);
        }
    }

    #[test]
    fn ecdf_eval_is_right_continuous() {
        let e = Ecdf::from_path(&path_of(&[1.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eval(1.0), 2.0 / 3.0);
        assert_eq!(e.eval_left(1.0), 0.0);
        assert_eq!(e.eval(0.99), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
    }

    #[test]
    fn sequential_and_parallel_studies_agree_exactly() {
        let spec = uniform_spec();
        let grid = [50usize, 100, 200];
        let a = convergence_study(&spec, &grid, 16, 9).unwrap();
        let b = convergence_study_parallel(&spec, &grid, 16, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn study_shows_root_n_decay_for_iid() {
        let spec = uniform_spec();
        let study = convergence_study(&spec, &[100, 316, 1000], 60, 4).unwrap();
        let b = study.decay_exponent();
        assert!(b > 0.3 && b < 0.7, "decay exponent {b}");
        assert!(study
            .deviations
            .iter()
            .flatten()
            .all(|&d| (0.0..=1.0).contains(&d)));
    }

    #[test]
    fn dkw_check_accepts_iid_and_rejects_chains() {
        let spec = uniform_spec();
        let study = convergence_study(&spec, &[200, 500], 100, 12).unwrap();
        let report = dkw_tail_check(&study).unwrap();
        assert!(report.pass);
        // The bound is stored clamped to 1.
        assert!(report.rows.iter().all(|r| r.bound <= 1.0));

        let model =
            TransitionModel::from_matrix(vec![0.0, 1.0], &[vec![0.7, 0.3], vec![0.2, 0.8]])
                .unwrap();
        let chain = ProcessSpec::new(ProcessKind::Markov(model), "chain").unwrap();
        let chain_study = convergence_study(&chain, &[100, 200], 10, 1).unwrap();
        assert!(matches!(
            dkw_tail_check(&chain_study),
            Err(LabError::Validation(_))
        ));
    }

    #[test]
    fn vacuous_bound_passes() {
        // n small enough that 2exp(-2nε²) ≥ 1 at ε = 0.05.
        let spec = uniform_spec();
        let study = convergence_study(&spec, &[10, 20], 50, 2).unwrap();
        let report = dkw_tail_check(&study).unwrap();
        let vacuous: Vec<&DkwRow> = report.rows.iter().filter(|r| r.bound >= 1.0).collect();
        assert!(!vacuous.is_empty());
        assert!(vacuous.iter().all(|r| r.pass));
    }
}
