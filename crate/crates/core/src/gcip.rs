//! Normalized variance-growth conditions for partial sums and block sums.
//!
//! For a stationary sequence and a bounded function f, two quantities are
//! tabulated over q:
//!
//! ```text
//!   s1(q) = q^{-(3-δ)/2} · Var(Σ_{i=1..q} f(X_i))
//!   s2(q) = q^{-(3-δ)}   · Var(Σ_{i=q²+1..(q+1)²} f(X_i))
//! ```
//!
//! Boundedness of both sups over q is the sufficient variance condition
//! behind the uniform-convergence theorems this crate checks. The sup over
//! all q is not verifiable in finite time; the scan reports a finite-q
//! diagnostic (log-log slope over the top half of the q range) and says so in
//! its metadata. Stationarity collapses the double covariance sums to lag
//! sums with multiplicities, so exact evaluation costs O(q) per cell.
//!
//! No finite-state chain violates these conditions, so GROWING counterexamples
//! are manufactured by injecting a synthetic covariance sequence directly;
//! such scans are labeled synthetic in every output.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fitting::ols;
use crate::procgen::{generate_stream, ProcessKind, ProcessSpec, TransitionModel};

/// Finite-q slope below which the max-curve counts as BOUNDED.
pub const SLOPE_TOL: f64 = 0.05;
/// Finite-q slope above which the max-curve counts as GROWING.
pub const GROWTH_TOL: f64 = 0.25;

/// Disclaimer attached to every report.
pub const FINITE_SCALE_NOTE: &str = "finite-q diagnostic over q <= q_max; boundedness of the \
     sup over all q is not provable at finite scale";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcipMode {
    ExactMarkov,
    MonteCarlo { reps: u32 },
}

/// Scan parameters; `delta` must lie in (0, 3), default 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcipParams {
    pub delta: f64,
    pub q_max: u32,
    pub x_grid: Vec<f64>,
    pub mode: GcipMode,
}

impl GcipParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 3.0) {
            return Err(LabError::Validation(format!(
                "delta must lie in (0, 3), got {}",
                self.delta
            )));
        }
        if self.q_max < 2 {
            return Err(LabError::Validation(format!(
                "q_max must be >= 2, got {}",
                self.q_max
            )));
        }
        if self.x_grid.is_empty() {
            return Err(LabError::Validation("x_grid must be nonempty".into()));
        }
        if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Validation("x_grid must be strictly ascending".into()));
        }
        if let GcipMode::MonteCarlo { reps } = self.mode {
            if reps < 2 {
                return Err(LabError::Validation("monte carlo needs reps >= 2".into()));
            }
        }
        Ok(())
    }
}

/// Synthetic lag-covariance sequence for manufacturing counterexamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovSequence {
    /// `Cov(h) = c · h^{-exponent}` for h ≥ 1.
    PowerLaw { c: f64, exponent: f64 },
    /// `Cov(h) = c · ratio^h` for h ≥ 1.
    Geometric { c: f64, ratio: f64 },
}

impl CovSequence {
    fn at(&self, h: usize) -> f64 {
        match *self {
            CovSequence::PowerLaw { c, exponent } => c * (h as f64).powf(-exponent),
            CovSequence::Geometric { c, ratio } => c * ratio.powi(h as i32),
        }
    }
}

/// What the variance conditions are evaluated on.
#[derive(Debug, Clone)]
pub enum GcipSource {
    /// Any process spec; exact mode requires a chain or iid marginal,
    /// Monte Carlo mode simulates replicated paths from (seed, stream).
    Process { spec: ProcessSpec, seed: u64 },
    /// Injected covariance sequence: `var0` at lag 0, `cov` beyond.
    Synthetic { var0: f64, cov: CovSequence, label: String },
}

impl GcipSource {
    pub fn label(&self) -> &str {
        match self {
            GcipSource::Process { spec, .. } => &spec.label,
            GcipSource::Synthetic { label, .. } => label,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self, GcipSource::Synthetic { .. })
    }
}

/// Which of the two variance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SCondition {
    S1,
    S2,
}

/// A function fed to the variance conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanFunction {
    /// `1{X ≤ x}` — works for every source.
    IndicatorLeq(f64),
    /// Per-state values; exact chains only.
    StateValues(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Boundedness {
    Bounded,
    Growing,
    Inconclusive,
}

impl std::fmt::Display for Boundedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundedness::Bounded => write!(f, "BOUNDED"),
            Boundedness::Growing => write!(f, "GROWING"),
            Boundedness::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

/// Per-column (per-x or per-function) slope diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDiag {
    pub label: String,
    pub s1_slope: f64,
    pub s1_verdict: Boundedness,
    pub s2_slope: f64,
    pub s2_verdict: Boundedness,
}

/// Tabulated variance conditions with boundedness diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcipReport {
    pub source_label: String,
    pub class_id: String,
    pub synthetic: bool,
    pub delta: f64,
    pub q_max: u32,
    pub columns: Vec<String>,
    /// `s1[col][q-1]`, q = 1..q_max.
    pub s1: Vec<Vec<f64>>,
    /// `s2[col][q-1]`, q = 1..q_max.
    pub s2: Vec<Vec<f64>>,
    pub c1_hat: f64,
    pub c2_hat: f64,
    /// Log-log slope of `max_col s1(·, q)` over the top half of the q range.
    pub s1_slope: f64,
    pub s2_slope: f64,
    /// Verdict from the s1 max-curve slope.
    pub bounded_verdict: Boundedness,
    pub s2_verdict: Boundedness,
    pub per_column: Vec<ColumnDiag>,
    pub slope_tol: f64,
    pub growth_tol: f64,
    pub note: String,
}

impl GcipReport {
    /// CSV body `x,q,s1,s2`; the x field carries the column label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,q,s1,s2\n");
        for (c, label) in self.columns.iter().enumerate() {
            for q in 1..=self.q_max as usize {
                out.push_str(&format!(
                    "{label},{q},{},{}\n",
                    self.s1[c][q - 1],
                    self.s2[c][q - 1]
                ));
            }
        }
        out
    }
}

/// Lag-covariance evaluator: everything the two conditions need.
enum VarModel {
    /// var0 plus lag covariances 1..=max_lag (exact routes).
    Exact { var0: f64, cov: Vec<f64> },
    /// Replicated paths (Monte Carlo route).
    Paths(Vec<Vec<f64>>),
}

impl VarModel {
    /// Variance of the sum of `len` consecutive terms.
    ///
    /// Exact route: `len·var0 + 2 Σ_h (len−h)·cov(h)` (stationarity collapse).
    /// Monte Carlo route: sample variance across replications of the sum of
    /// f over the first `len` values.
    fn var_sum(&self, len: usize, f: &dyn Fn(f64) -> f64) -> f64 {
        match self {
            VarModel::Exact { var0, cov } => {
                let mut acc = len as f64 * var0;
                for h in 1..len {
                    acc += 2.0 * (len - h) as f64 * cov[h - 1];
                }
                acc
            }
            VarModel::Paths(paths) => {
                let sums: Vec<f64> = paths
                    .iter()
                    .map(|p| p[..len].iter().map(|&v| f(v)).sum())
                    .collect();
                sample_variance(&sums)
            }
        }
    }
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

fn indicator_fn(x: f64) -> impl Fn(f64) -> f64 {
    move |v| if v <= x { 1.0 } else { 0.0 }
}

/// Builds the evaluator for one scan function, with max block length `max_len`.
fn build_var_model(
    source: &GcipSource,
    func: &ScanFunction,
    mode: &GcipMode,
    max_len: usize,
) -> Result<VarModel> {
    match source {
        GcipSource::Synthetic { var0, cov, .. } => {
            if matches!(func, ScanFunction::StateValues(_)) {
                return Err(LabError::Validation(
                    "synthetic covariance sources take no state functions".into(),
                ));
            }
            Ok(VarModel::Exact {
                var0: *var0,
                cov: (1..max_len).map(|h| cov.at(h)).collect(),
            })
        }
        GcipSource::Process { spec, seed } => {
            spec.validate()?;
            match mode {
                GcipMode::ExactMarkov => exact_var_model(spec, func, max_len),
                GcipMode::MonteCarlo { reps } => {
                    let paths = (0..*reps)
                        .map(|r| {
                            generate_stream(spec, max_len, *seed, r as u64).map(|p| p.values)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(VarModel::Paths(paths))
                }
            }
        }
    }
}

/// Exact var0/cov(h) for chains and iid marginals.
fn exact_var_model(spec: &ProcessSpec, func: &ScanFunction, max_len: usize) -> Result<VarModel> {
    match (&spec.kind, func) {
        (ProcessKind::Markov(model), _) => {
            let values = state_values(model, func)?;
            let var0 = crate::covcheck::cov_exact(model, &values, &values, 0)?;
            let cov = markov_lag_covs(model, &values, max_len.saturating_sub(1));
            Ok(VarModel::Exact { var0, cov })
        }
        (ProcessKind::Iid(m), ScanFunction::IndicatorLeq(x)) => {
            let f = m.cdf(*x);
            Ok(VarModel::Exact {
                var0: f * (1.0 - f),
                cov: vec![0.0; max_len.saturating_sub(1)],
            })
        }
        _ => Err(LabError::Validation(format!(
            "exact mode supports finite chains (any function) and iid marginals \
             (indicator functions); got {} with {func:?}",
            spec.label
        ))),
    }
}

fn state_values(model: &TransitionModel, func: &ScanFunction) -> Result<Vec<f64>> {
    match func {
        ScanFunction::IndicatorLeq(x) => Ok(model.indicator_leq(*x)),
        ScanFunction::StateValues(v) => {
            if v.len() != model.k() {
                return Err(LabError::Validation(format!(
                    "state function has {} entries for a {}-state model",
                    v.len(),
                    model.k()
                )));
            }
            Ok(v.clone())
        }
    }
}

/// `Cov(f(X_0), f(X_h))` for h = 1..=lags via incremental matrix powers.
fn markov_lag_covs(model: &TransitionModel, values: &[f64], lags: usize) -> Vec<f64> {
    let k = model.k();
    let mean: f64 = (0..k).map(|i| model.pi[i] * values[i]).sum();
    let mut power = model.p.clone();
    let mut out = Vec::with_capacity(lags);
    for h in 0..lags {
        if h > 0 {
            power = crate::procgen::mat_mul(k, &power, &model.p);
        }
        let mut joint = 0.0;
        for i in 0..k {
            let mut row = 0.0;
            for j in 0..k {
                row += power[i * k + j] * values[j];
            }
            joint += model.pi[i] * values[i] * row;
        }
        out.push(joint - mean * mean);
    }
    out
}

fn normalization(q: u32, exponent: f64) -> f64 {
    (q as f64).powf(exponent)
}

fn s_value(model: &VarModel, which: SCondition, q: u32, delta: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let v = match which {
        SCondition::S1 => model.var_sum(q as usize, f) / normalization(q, (3.0 - delta) / 2.0),
        SCondition::S2 => {
            // Block i = q²+1 .. (q+1)² has length 2q+1; under stationarity its
            // variance equals that of the first 2q+1 terms.
            let len = 2 * q as usize + 1;
            model.var_sum(len, f) / normalization(q, 3.0 - delta)
        }
    };
    // Normalized variances are nonnegative; squash float noise around zero.
    v.max(0.0)
}

fn check_delta_q(delta: f64, q: u32) -> Result<()> {
    if !(delta > 0.0 && delta < 3.0) {
        return Err(LabError::Validation(format!(
            "delta must lie in (0, 3), got {delta}"
        )));
    }
    if q == 0 {
        return Err(LabError::Validation("q must be >= 1".into()));
    }
    Ok(())
}

fn mode_of(source: &GcipSource, mc_reps: Option<u32>) -> GcipMode {
    match (source, mc_reps) {
        (_, Some(reps)) => GcipMode::MonteCarlo { reps },
        (GcipSource::Process { spec, .. }, None) if !exactable(spec) => {
            GcipMode::MonteCarlo { reps: 2000 }
        }
        _ => GcipMode::ExactMarkov,
    }
}

fn exactable(spec: &ProcessSpec) -> bool {
    matches!(spec.kind, ProcessKind::Markov(_) | ProcessKind::Iid(_))
}

/// Normalized partial-sum variance of the indicator `1{X ≤ x}` at scale q.
pub fn s1_indicator(source: &GcipSource, x: f64, q: u32, delta: f64) -> Result<f64> {
    check_delta_q(delta, q)?;
    let func = ScanFunction::IndicatorLeq(x);
    let model = build_var_model(source, &func, &mode_of(source, None), q as usize)?;
    Ok(s_value(&model, SCondition::S1, q, delta, &indicator_fn(x)))
}

/// Normalized block-sum variance of the indicator `1{X ≤ x}` at scale q.
pub fn s2_indicator(source: &GcipSource, x: f64, q: u32, delta: f64) -> Result<f64> {
    check_delta_q(delta, q)?;
    let func = ScanFunction::IndicatorLeq(x);
    let model = build_var_model(source, &func, &mode_of(source, None), 2 * q as usize + 1)?;
    Ok(s_value(&model, SCondition::S2, q, delta, &indicator_fn(x)))
}

/// Normalized variance condition for a general bounded function.
///
/// Exact route: per-state values on a chain. Monte Carlo route: pass
/// `mc_reps` and an `envelope` bound for f (required: the estimator is only
/// meaningful for bounded functions).
pub fn s_functional(
    source: &GcipSource,
    func: &ScanFunction,
    q: u32,
    delta: f64,
    which: SCondition,
    mc_reps: Option<u32>,
    envelope: Option<f64>,
) -> Result<f64> {
    check_delta_q(delta, q)?;
    let mode = mode_of(source, mc_reps);
    if matches!(mode, GcipMode::MonteCarlo { .. })
        && matches!(func, ScanFunction::StateValues(_))
    {
        return Err(LabError::Validation(
            "monte carlo mode takes indicator functions; state-value functions are exact-only"
                .into(),
        ));
    }
    if matches!(mode, GcipMode::MonteCarlo { .. }) && envelope.is_none() {
        return Err(LabError::Validation(
            "monte carlo mode requires an envelope bound for the function".into(),
        ));
    }
    let len = match which {
        SCondition::S1 => q as usize,
        SCondition::S2 => 2 * q as usize + 1,
    };
    let model = build_var_model(source, func, &mode, len)?;
    let f: Box<dyn Fn(f64) -> f64> = match func {
        ScanFunction::IndicatorLeq(x) => Box::new(indicator_fn(*x)),
        ScanFunction::StateValues(_) => Box::new(|_| f64::NAN), // exact route never calls it
    };
    Ok(s_value(&model, which, q, delta, &f))
}

fn slope_verdict(curve: &[f64], q_max: u32) -> (f64, Boundedness) {
    let lo = (q_max / 2).max(1) as usize;
    let qs: Vec<f64> = (lo..=q_max as usize).map(|q| q as f64).collect();
    let ys: Vec<f64> = (lo..=q_max as usize).map(|q| curve[q - 1]).collect();
    // A flat-zero curve (x outside support) is trivially bounded.
    if ys.iter().all(|&y| y <= 1e-300) {
        return (0.0, Boundedness::Bounded);
    }
    let fit = match ols(
        &qs.iter().map(|q| q.ln()).collect::<Vec<_>>(),
        &ys.iter().map(|y| y.max(1e-300).ln()).collect::<Vec<_>>(),
    ) {
        Ok(f) => f,
        Err(_) => return (f64::NAN, Boundedness::Inconclusive),
    };
    let verdict = if fit.slope <= SLOPE_TOL {
        Boundedness::Bounded
    } else if fit.slope >= GROWTH_TOL {
        Boundedness::Growing
    } else {
        Boundedness::Inconclusive
    };
    (fit.slope, verdict)
}

/// Tabulates s1/s2 over the x grid (or a supplied function family) and
/// q = 1..q_max, with sup estimates and boundedness diagnostics.
pub fn gcip_scan(
    source: &GcipSource,
    params: &GcipParams,
    f_family: Option<&[(String, ScanFunction)]>,
) -> Result<GcipReport> {
    params.validate()?;
    let q_max = params.q_max;
    let max_len = 2 * q_max as usize + 1;

    let family: Vec<(String, ScanFunction)> = match (f_family, source) {
        (Some(fam), _) => {
            if fam.is_empty() {
                return Err(LabError::Validation("function family must be nonempty".into()));
            }
            fam.to_vec()
        }
        (None, GcipSource::Synthetic { .. }) => {
            // The injected covariances already fix the function; one column.
            vec![("synthetic".to_string(), ScanFunction::IndicatorLeq(f64::NAN))]
        }
        (None, GcipSource::Process { .. }) => params
            .x_grid
            .iter()
            .map(|&x| (format!("{x}"), ScanFunction::IndicatorLeq(x)))
            .collect(),
    };

    let class_id = match f_family {
        Some(_) => "function_family".to_string(),
        None => "half_line_indicators".to_string(),
    };

    let mut s1 = Vec::with_capacity(family.len());
    let mut s2 = Vec::with_capacity(family.len());
    for (_, func) in &family {
        let model = match source {
            GcipSource::Synthetic { .. } => {
                build_var_model(source, &ScanFunction::IndicatorLeq(f64::NAN), &params.mode, max_len)?
            }
            _ => build_var_model(source, func, &params.mode, max_len)?,
        };
        let f: Box<dyn Fn(f64) -> f64> = match func {
            ScanFunction::IndicatorLeq(x) => Box::new(indicator_fn(*x)),
            ScanFunction::StateValues(_) => Box::new(|_| f64::NAN),
        };
        let mut col1 = Vec::with_capacity(q_max as usize);
        let mut col2 = Vec::with_capacity(q_max as usize);
        for q in 1..=q_max {
            col1.push(s_value(&model, SCondition::S1, q, params.delta, &f));
            col2.push(s_value(&model, SCondition::S2, q, params.delta, &f));
        }
        s1.push(col1);
        s2.push(col2);
    }

    let max_curve = |table: &[Vec<f64>]| -> Vec<f64> {
        (0..q_max as usize)
            .map(|qi| table.iter().map(|col| col[qi]).fold(f64::MIN, f64::max))
            .collect()
    };
    let s1_max = max_curve(&s1);
    let s2_max = max_curve(&s2);
    let (s1_slope, s1_verdict) = slope_verdict(&s1_max, q_max);
    let (s2_slope, s2_verdict) = slope_verdict(&s2_max, q_max);

    let per_column = family
        .iter()
        .enumerate()
        .map(|(c, (label, _))| {
            let (a, va) = slope_verdict(&s1[c], q_max);
            let (b, vb) = slope_verdict(&s2[c], q_max);
            ColumnDiag {
                label: label.clone(),
                s1_slope: a,
                s1_verdict: va,
                s2_slope: b,
                s2_verdict: vb,
            }
        })
        .collect();

    let flat_max = |table: &[Vec<f64>]| {
        table
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    };

    Ok(GcipReport {
        source_label: source.label().to_string(),
        class_id,
        synthetic: source.is_synthetic(),
        delta: params.delta,
        q_max,
        columns: family.into_iter().map(|(l, _)| l).collect(),
        c1_hat: flat_max(&s1),
        c2_hat: flat_max(&s2),
        s1,
        s2,
        s1_slope,
        s2_slope,
        bounded_verdict: s1_verdict,
        s2_verdict,
        per_column,
        slope_tol: SLOPE_TOL,
        growth_tol: GROWTH_TOL,
        note: FINITE_SCALE_NOTE.to_string(),
    })
}

/// Checks numerically that partial-sum boundedness implies block-sum
/// boundedness: no column may be s1-BOUNDED yet s2-GROWING.
pub fn implication_check(report: &GcipReport) -> bool {
    !report.per_column.iter().any(|c| {
        c.s1_verdict == Boundedness::Bounded && c.s2_verdict == Boundedness::Growing
    })
}
